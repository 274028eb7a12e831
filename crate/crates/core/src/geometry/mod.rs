//! Geometric verification of putative matches with a planar homography.

mod homography;
mod ransac;

pub use homography::{estimate_homography, estimate_similarity, project_point, Homography, Point};
pub use ransac::{ransac_verify, ModelKind, RansacConfig, VerificationResult};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("point maps to infinity")]
    PointAtInfinity,
    #[error("point configuration is degenerate (collinear or repeated points)")]
    DegenerateConfiguration,
    #[error("linear system is singular")]
    SingularSystem,
    #[error("need at least {needed} correspondences, got {got}")]
    InsufficientMatches { needed: usize, got: usize },
}
