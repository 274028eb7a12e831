//! Object database and the end-to-end recognition query.
//!
//! A [`Database`] is an immutable snapshot: [`index_image`] returns a new
//! one, so any number of queries may share a snapshot while a writer builds
//! the next. On disk it is a single versioned JSON document.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{
    extract_features, Descriptor, ExtractionConfig, FeatureError, FeatureSet, InterestPoint,
};
use crate::geometry::{ransac_verify, Point, RansacConfig, VerificationResult};
use crate::image::RasterImage;
use crate::matching::{match_descriptors, Match, MatchConfig};

pub const DB_VERSION: u32 = 1;

/// Value of [`QueryResult::best`] when no candidate is verified.
pub const UNRECOGNIZED: &str = "unrecognized";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid database file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported database version {found} (expected {})", DB_VERSION)]
    VersionMismatch { found: String },
    #[error("object id {0:?} already exists")]
    DuplicateId(String),
    #[error("no interest points found in image")]
    NoFeatures,
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecordRepr", into = "RecordRepr")]
pub struct ObjectRecord {
    pub id: String,
    pub name: String,
    pub info: String,
    /// `(width, height)` of the indexed image.
    pub image_size: (usize, usize),
    pub keypoints: Vec<InterestPoint>,
    pub descriptors: Vec<Descriptor>,
}

impl ObjectRecord {
    /// Corners of the indexed image, clockwise from the origin.
    pub fn corners(&self) -> [Point; 4] {
        let (w, h) = (
            self.image_size.0 as f64 - 1.0,
            self.image_size.1 as f64 - 1.0,
        );
        [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
    }
}

/// Descriptors are stored as bare arrays; their sign lives on the keypoint.
#[derive(Serialize, Deserialize)]
struct RecordRepr {
    id: String,
    name: String,
    info: String,
    image_size: [usize; 2],
    keypoints: Vec<InterestPoint>,
    descriptors: Vec<Vec<f64>>,
}

impl From<ObjectRecord> for RecordRepr {
    fn from(r: ObjectRecord) -> Self {
        Self {
            id: r.id,
            name: r.name,
            info: r.info,
            image_size: [r.image_size.0, r.image_size.1],
            keypoints: r.keypoints,
            descriptors: r
                .descriptors
                .iter()
                .map(|d| d.components.to_vec())
                .collect(),
        }
    }
}

impl TryFrom<RecordRepr> for ObjectRecord {
    type Error = String;

    fn try_from(r: RecordRepr) -> Result<Self, String> {
        if r.keypoints.len() != r.descriptors.len() {
            return Err(format!(
                "object {:?}: {} keypoints but {} descriptors",
                r.id,
                r.keypoints.len(),
                r.descriptors.len()
            ));
        }
        let descriptors = r
            .keypoints
            .iter()
            .zip(&r.descriptors)
            .map(|(kp, v)| {
                Descriptor::try_from((v.as_slice(), kp.laplacian_sign))
                    .map_err(|len| format!("object {:?}: descriptor of length {len}", r.id))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            id: r.id,
            name: r.name,
            info: r.info,
            image_size: (r.image_size[0], r.image_size[1]),
            keypoints: r.keypoints,
            descriptors,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Database {
    pub version: u32,
    pub extraction_config: ExtractionConfig,
    #[serde(rename = "objects")]
    pub records: Vec<ObjectRecord>,
}

impl Default for Database {
    fn default() -> Self {
        Self::new(ExtractionConfig::default())
    }
}

impl Database {
    pub fn new(extraction_config: ExtractionConfig) -> Self {
        Self {
            version: DB_VERSION,
            extraction_config,
            records: Vec::new(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&ObjectRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("database is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        match raw.get("version") {
            Some(v) if v.as_u64() == Some(u64::from(DB_VERSION)) => {}
            Some(v) => {
                return Err(StoreError::VersionMismatch {
                    found: v.to_string(),
                })
            }
            None => {
                return Err(StoreError::VersionMismatch {
                    found: "none".into(),
                })
            }
        }
        Ok(serde_json::from_str(text)?)
    }
}

/// Extracts features from `img` under the database configuration and
/// returns a snapshot with the new record appended.
pub fn index_image(
    db: &Database,
    img: &RasterImage,
    id: &str,
    name: &str,
    info: &str,
) -> Result<Database, StoreError> {
    if db.get(id).is_some() {
        return Err(StoreError::DuplicateId(id.to_owned()));
    }
    let features = extract_features(img, &db.extraction_config)?;
    if features.is_empty() {
        return Err(StoreError::NoFeatures);
    }
    let mut next = db.clone();
    next.records.push(ObjectRecord {
        id: id.to_owned(),
        name: name.to_owned(),
        info: info.to_owned(),
        image_size: (img.width(), img.height()),
        keypoints: features.points,
        descriptors: features.descriptors,
    });
    Ok(next)
}

pub fn save_db(db: &Database, path: impl AsRef<Path>) -> Result<(), StoreError> {
    fs::write(path, db.to_json() + "\n")?;
    Ok(())
}

pub fn load_db(path: impl AsRef<Path>) -> Result<Database, StoreError> {
    Database::from_json(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QueryConfig {
    pub matching: MatchConfig,
    pub ransac: RansacConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub match_count: usize,
    /// Inlier indices refer to `matches`, which runs from record keypoints
    /// to query keypoints.
    pub verification: VerificationResult,
    #[serde(skip)]
    pub matches: Vec<Match>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociatedInfo {
    pub name: String,
    pub info: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    /// Object id, or `"unrecognized"`.
    pub best: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub associated_info: Option<AssociatedInfo>,
    /// The recognized object's corners projected into the query image.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub frame: Option<[Point; 4]>,
    /// Query-image positions of the recognized object's inlier matches.
    #[serde(default)]
    pub inlier_points: Vec<Point>,
    pub ranked: Vec<Candidate>,
}

impl QueryResult {
    pub fn is_recognized(&self) -> bool {
        self.best != UNRECOGNIZED
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("query result is always serializable")
    }
}

/// Ranking key: verified first, then inliers, matches, and id.
fn rank(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    b.verification
        .verified
        .cmp(&a.verification.verified)
        .then(
            b.verification
                .inlier_count()
                .cmp(&a.verification.inlier_count()),
        )
        .then(b.match_count.cmp(&a.match_count))
        .then(a.id.cmp(&b.id))
}

fn verify(record: &ObjectRecord, query: &FeatureSet, cfg: &QueryConfig) -> Candidate {
    let matches = match_descriptors(&query.descriptors, &record.descriptors, &cfg.matching);
    let src: Vec<Point> = matches
        .iter()
        .map(|m| {
            let kp = &record.keypoints[m.target_index];
            (kp.x, kp.y)
        })
        .collect();
    let dst: Vec<Point> = matches
        .iter()
        .map(|m| {
            let kp = &query.points[m.query_index];
            (kp.x, kp.y)
        })
        .collect();
    let verification =
        ransac_verify(&src, &dst, &cfg.ransac).unwrap_or_else(|_| VerificationResult::unverified());
    Candidate {
        id: record.id.clone(),
        match_count: matches.len(),
        verification,
        matches,
    }
}

/// Matches and verifies a query image against every record.
pub fn query_image(
    db: &Database,
    img: &RasterImage,
    cfg: &QueryConfig,
) -> Result<QueryResult, StoreError> {
    let features = extract_features(img, &db.extraction_config)?;
    if features.is_empty() {
        return Err(StoreError::NoFeatures);
    }
    Ok(query_features(db, &features, cfg))
}

/// [`query_image`] for features that were already extracted under the
/// database configuration.
pub fn query_features(db: &Database, features: &FeatureSet, cfg: &QueryConfig) -> QueryResult {
    let mut ranked: Vec<Candidate> = db
        .records
        .iter()
        .map(|r| verify(r, features, cfg))
        .collect();
    ranked.sort_by(rank);

    let winner = ranked.first().filter(|c| c.verification.verified);
    let Some(winner) = winner else {
        return QueryResult {
            best: UNRECOGNIZED.to_owned(),
            associated_info: None,
            frame: None,
            inlier_points: Vec::new(),
            ranked,
        };
    };
    let record = db
        .get(&winner.id)
        .expect("candidate comes from the database");
    let model = winner
        .verification
        .model
        .as_ref()
        .expect("verified results carry a model");
    let frame = record
        .corners()
        .iter()
        .map(|&c| model.project(c))
        .collect::<Result<Vec<_>, _>>()
        .ok()
        .map(|v| [v[0], v[1], v[2], v[3]]);
    let inlier_points = winner
        .verification
        .inlier_indices
        .iter()
        .map(|&i| {
            let kp = &features.points[winner.matches[i].query_index];
            (kp.x, kp.y)
        })
        .collect();
    QueryResult {
        best: record.id.clone(),
        associated_info: Some(AssociatedInfo {
            name: record.name.clone(),
            info: record.info.clone(),
        }),
        frame,
        inlier_points,
        ranked,
    }
}

/// Output document of feature extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub config: ExtractionConfig,
    pub points: Vec<InterestPoint>,
    pub descriptors: Vec<Vec<f64>>,
}

impl FeatureReport {
    pub fn new(config: &ExtractionConfig, features: &FeatureSet) -> Self {
        Self {
            config: *config,
            points: features.points.clone(),
            descriptors: features
                .descriptors
                .iter()
                .map(|d| d.components.to_vec())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("feature report is always serializable")
    }
}
