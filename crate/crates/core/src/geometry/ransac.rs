use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::homography::{
    estimate_homography, estimate_similarity, is_degenerate, Homography, Point,
};
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Homography,
    /// Rotation, uniform scale and translation; for scenes where a full
    /// homography is poorly constrained.
    Similarity,
}

impl ModelKind {
    fn sample_size(self) -> usize {
        match self {
            Self::Homography => 4,
            Self::Similarity => 2,
        }
    }

    fn fit(self, src: &[Point], dst: &[Point]) -> Result<Homography, GeometryError> {
        match self {
            Self::Homography => estimate_homography(src, dst),
            Self::Similarity => estimate_similarity(src, dst),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RansacConfig {
    pub max_iterations: usize,
    pub confidence: f64,
    /// Maximum transfer error, in pixels, for a correspondence to count as
    /// an inlier.
    pub inlier_threshold: f64,
    pub min_inliers: usize,
    /// Fraction of the correspondences that must agree, on top of
    /// `min_inliers`.
    pub min_inlier_fraction: f64,
    pub seed: u64,
    pub model: ModelKind,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            confidence: 0.99,
            inlier_threshold: 3.0,
            min_inliers: 8,
            min_inlier_fraction: 0.15,
            seed: 0,
            model: ModelKind::Homography,
        }
    }
}

impl RansacConfig {
    /// Consensus size needed to accept a model for `n` correspondences.
    pub fn required_inliers(&self, n: usize) -> usize {
        let frac = (self.min_inlier_fraction * n as f64).ceil() as usize;
        self.min_inliers.max(frac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    /// Present only when `verified`.
    pub model: Option<Homography>,
    /// Indices of the largest consensus set found, ascending.
    pub inlier_indices: Vec<usize>,
    /// Mean transfer error over `inlier_indices`, zero when empty.
    pub mean_reprojection_error: f64,
    pub verified: bool,
}

impl VerificationResult {
    pub fn unverified() -> Self {
        Self {
            model: None,
            inlier_indices: Vec::new(),
            mean_reprojection_error: 0.0,
            verified: false,
        }
    }

    pub fn inlier_count(&self) -> usize {
        self.inlier_indices.len()
    }
}

struct Consensus {
    model: Homography,
    inliers: Vec<usize>,
    error_sum: f64,
}

impl Consensus {
    fn evaluate(model: Homography, src: &[Point], dst: &[Point], threshold: f64) -> Self {
        let mut inliers = Vec::new();
        let mut error_sum = 0.0;
        for (i, (&s, &d)) in src.iter().zip(dst).enumerate() {
            let e = model.transfer_error(s, d);
            if e <= threshold {
                inliers.push(i);
                error_sum += e;
            }
        }
        Self {
            model,
            inliers,
            error_sum,
        }
    }

    fn beats(&self, other: &Consensus) -> bool {
        self.inliers.len() > other.inliers.len()
            || (self.inliers.len() == other.inliers.len() && self.error_sum < other.error_sum)
    }
}

fn iterations_needed(inlier_ratio: f64, sample_size: usize, confidence: f64) -> f64 {
    let p = inlier_ratio.powi(sample_size as i32);
    if p <= 0.0 {
        return f64::INFINITY;
    }
    if p >= 1.0 {
        return 0.0;
    }
    ((1.0 - confidence).ln() / (1.0 - p).ln()).ceil()
}

/// Robustly fits a model mapping `src[i]` to `dst[i]` and decides whether
/// enough correspondences agree with it.
///
/// Hypotheses come from minimal random samples drawn with a generator
/// seeded from `cfg.seed`; the iteration budget shrinks as the best
/// consensus grows. The winning consensus is refitted by least squares
/// until its inlier set stops growing.
pub fn ransac_verify(
    src: &[Point],
    dst: &[Point],
    cfg: &RansacConfig,
) -> Result<VerificationResult, GeometryError> {
    let n = src.len().min(dst.len());
    if n < 4 {
        return Err(GeometryError::InsufficientMatches { needed: 4, got: n });
    }
    let (src, dst) = (&src[..n], &dst[..n]);
    let k = cfg.model.sample_size();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut best: Option<Consensus> = None;
    let mut budget = cfg.max_iterations as f64;
    let mut iteration = 0usize;
    while (iteration as f64) < budget.min(cfg.max_iterations as f64) {
        iteration += 1;
        let idx = sample(&mut rng, n, k);
        let s: Vec<Point> = idx.iter().map(|i| src[i]).collect();
        let d: Vec<Point> = idx.iter().map(|i| dst[i]).collect();
        if cfg.model == ModelKind::Homography
            && (is_degenerate(&s, 1e-9) || is_degenerate(&d, 1e-9))
        {
            continue;
        }
        let Ok(model) = cfg.model.fit(&s, &d) else {
            continue;
        };
        let candidate = Consensus::evaluate(model, src, dst, cfg.inlier_threshold);
        if best.as_ref().is_none_or(|b| candidate.beats(b)) {
            budget =
                iterations_needed(candidate.inliers.len() as f64 / n as f64, k, cfg.confidence);
            best = Some(candidate);
        }
    }

    let Some(mut best) = best else {
        return Ok(VerificationResult::unverified());
    };

    for _ in 0..10 {
        if best.inliers.len() < k.max(4) {
            break;
        }
        let s: Vec<Point> = best.inliers.iter().map(|&i| src[i]).collect();
        let d: Vec<Point> = best.inliers.iter().map(|&i| dst[i]).collect();
        let Ok(model) = cfg.model.fit(&s, &d) else {
            break;
        };
        let refit = Consensus::evaluate(model, src, dst, cfg.inlier_threshold);
        if refit.inliers.len() < best.inliers.len() {
            break;
        }
        let unchanged = refit.inliers == best.inliers;
        best = refit;
        if unchanged {
            break;
        }
    }

    let count = best.inliers.len();
    let verified = count >= cfg.required_inliers(n);
    Ok(VerificationResult {
        model: verified.then_some(best.model),
        mean_reprojection_error: if count > 0 {
            best.error_sum / count as f64
        } else {
            0.0
        },
        inlier_indices: best.inliers,
        verified,
    })
}
