//! Exhaustive nearest-neighbor descriptor matching with a ratio test.
//!
//! Candidates can be restricted to descriptors whose Laplacian sign agrees
//! with the query: a bright blob never matches a dark one, which also skips
//! about half of the distance computations.

use serde::{Deserialize, Serialize};

use crate::features::Descriptor;

/// Nearest-neighbor distance below which a lone candidate is accepted.
const SINGLE_CANDIDATE_MAX_DISTANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub query_index: usize,
    pub target_index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub ratio_threshold: f64,
    pub use_sign_filter: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            ratio_threshold: 0.7,
            use_sign_filter: true,
        }
    }
}

impl MatchConfig {
    pub fn is_valid(&self) -> bool {
        self.ratio_threshold > 0.0 && self.ratio_threshold <= 1.0
    }
}

/// Euclidean distance between two descriptors.
pub fn distance(a: &Descriptor, b: &Descriptor) -> f64 {
    a.components
        .iter()
        .zip(&b.components)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Matches every query descriptor to its nearest target.
///
/// A match is kept when the nearest distance is below `ratio_threshold`
/// times the second-nearest, or, when only one candidate exists, when it
/// lies closer than 0.5. Nearest-neighbor ties go to the lower target
/// index. Output is sorted by distance, then query and target index.
pub fn match_descriptors(
    query: &[Descriptor],
    target: &[Descriptor],
    cfg: &MatchConfig,
) -> Vec<Match> {
    let mut matches = Vec::new();
    for (qi, q) in query.iter().enumerate() {
        let mut first: Option<(usize, f64)> = None;
        let mut second: Option<f64> = None;
        let mut candidates = 0usize;
        for (ti, t) in target.iter().enumerate() {
            if cfg.use_sign_filter && t.laplacian_sign != q.laplacian_sign {
                continue;
            }
            candidates += 1;
            let d = distance(q, t);
            match first {
                Some((_, d1)) if d >= d1 => {
                    if second.is_none_or(|d2| d < d2) {
                        second = Some(d);
                    }
                }
                _ => {
                    second = first.map(|(_, d1)| d1);
                    first = Some((ti, d));
                }
            }
        }
        let Some((ti, d1)) = first else { continue };
        let accept = match second {
            Some(d2) => d1 < cfg.ratio_threshold * d2,
            None => candidates == 1 && d1 < SINGLE_CANDIDATE_MAX_DISTANCE,
        };
        if accept {
            matches.push(Match {
                query_index: qi,
                target_index: ti,
                distance: d1,
            });
        }
    }
    sort_matches(&mut matches);
    matches
}

pub fn sort_matches(matches: &mut [Match]) {
    matches.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.query_index.cmp(&b.query_index))
            .then(a.target_index.cmp(&b.target_index))
    });
}
