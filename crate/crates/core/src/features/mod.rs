//! Fast-Hessian interest points and 64-d Haar-wavelet descriptors.
//!
//! Extraction runs in six stages: grayscale conversion, integral image,
//! response maps over a box-filter scale-space, 3x3x3 non-maximum
//! suppression with quadratic refinement, orientation assignment, and
//! descriptor extraction. Each stage is exposed on its own so callers can
//! inspect intermediate results; [`extract_features`] composes them.

mod descriptor;
mod detect;
mod orientation;
mod response;

pub use descriptor::{extract_descriptor, Descriptor, DESCRIPTOR_LEN};
pub use detect::{detect_interest_points, find_extrema, refine_extremum, Extremum};
pub use orientation::assign_orientation;
pub use response::{build_response_maps, filter_size, hessian_at, HessianSample, ResponseMap};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::RasterImage;
use crate::integral::{build_integral, IntegralImage};

/// Smallest image side the 9x9 base filter fits into.
pub const MIN_IMAGE_SIDE: usize = 9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FeatureError {
    #[error("image is {width}x{height}, feature extraction needs at least 9x9")]
    ImageTooSmall { width: usize, height: usize },
    #[error("invalid extraction config: {0}")]
    InvalidConfig(String),
}

/// Sign of the Hessian trace at detection time. Bright blobs on a dark
/// background have a negative trace, dark blobs a positive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum LaplacianSign {
    Negative,
    Positive,
}

impl LaplacianSign {
    /// Zero trace maps to `Positive`.
    pub fn of(trace: f64) -> Self {
        if trace < 0.0 {
            Self::Negative
        } else {
            Self::Positive
        }
    }
}

impl From<LaplacianSign> for i8 {
    fn from(s: LaplacianSign) -> i8 {
        match s {
            LaplacianSign::Negative => -1,
            LaplacianSign::Positive => 1,
        }
    }
}

impl TryFrom<i8> for LaplacianSign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            -1 => Ok(Self::Negative),
            1 => Ok(Self::Positive),
            other => Err(format!("laplacian sign must be -1 or 1, got {other}")),
        }
    }
}

/// A localized scale-space maximum of the Hessian response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterestPoint {
    pub x: f64,
    pub y: f64,
    /// Gaussian sigma equivalent of the detection filter.
    pub scale: f64,
    /// Radians in `[0, 2pi)`; zero until orientation is assigned.
    pub orientation: f64,
    #[serde(rename = "laplacian")]
    pub laplacian_sign: LaplacianSign,
    pub response: f64,
}

/// Orientation-assignment window parameters, in units of the point scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientationParams {
    pub radius: f64,
    pub haar_size: f64,
    pub sigma: f64,
    pub window: f64,
    pub step: f64,
}

impl Default for OrientationParams {
    fn default() -> Self {
        Self {
            radius: 6.0,
            haar_size: 4.0,
            sigma: 2.5,
            window: PI / 3.0,
            step: PI / 32.0,
        }
    }
}

/// Descriptor window parameters. `window` and `haar_size` and `sigma` are
/// in units of the point scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorParams {
    pub window: f64,
    pub subregions: usize,
    pub samples: usize,
    pub haar_size: f64,
    pub sigma: f64,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            window: 20.0,
            subregions: 4,
            samples: 5,
            haar_size: 2.0,
            sigma: 3.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub octaves: usize,
    pub intervals: usize,
    pub threshold: f64,
    pub upright: bool,
    pub orientation: OrientationParams,
    pub descriptor: DescriptorParams,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            octaves: 3,
            intervals: 4,
            threshold: 4e-4,
            upright: false,
            orientation: OrientationParams::default(),
            descriptor: DescriptorParams::default(),
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        let fail = |msg: String| Err(FeatureError::InvalidConfig(msg));
        if !(1..=4).contains(&self.octaves) {
            return fail(format!("octaves must be in 1..=4, got {}", self.octaves));
        }
        if !(3..=8).contains(&self.intervals) {
            return fail(format!(
                "intervals must be in 3..=8, got {}",
                self.intervals
            ));
        }
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return fail(format!(
                "threshold must be finite and >= 0, got {}",
                self.threshold
            ));
        }
        let o = &self.orientation;
        if [o.radius, o.haar_size, o.sigma, o.window, o.step]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return fail("orientation parameters must be positive".into());
        }
        let d = &self.descriptor;
        if d.subregions * d.subregions * 4 != DESCRIPTOR_LEN {
            return fail(format!(
                "descriptor needs 4x4 subregions for {DESCRIPTOR_LEN} components, got {}",
                d.subregions
            ));
        }
        if d.samples == 0
            || [d.window, d.haar_size, d.sigma]
                .iter()
                .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return fail("descriptor parameters must be positive".into());
        }
        Ok(())
    }
}

/// Interest points paired index-for-index with their descriptors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    pub points: Vec<InterestPoint>,
    pub descriptors: Vec<Descriptor>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Runs detection, orientation and description on a prepared integral image.
pub fn extract_from_integral(
    ii: &IntegralImage,
    config: &ExtractionConfig,
) -> Result<FeatureSet, FeatureError> {
    config.validate()?;
    let maps = build_response_maps(ii, config)?;
    let detected = detect_interest_points(&maps, config.threshold);
    let mut set = FeatureSet {
        points: Vec::with_capacity(detected.len()),
        descriptors: Vec::with_capacity(detected.len()),
    };
    for ip in detected {
        let ip = if config.upright {
            ip
        } else {
            assign_orientation(ii, &ip, &config.orientation)
        };
        set.descriptors.push(extract_descriptor(
            ii,
            &ip,
            config.upright,
            &config.descriptor,
        ));
        set.points.push(ip);
    }
    Ok(set)
}

/// Full extraction chain from an RGB image.
pub fn extract_features(
    img: &RasterImage,
    config: &ExtractionConfig,
) -> Result<FeatureSet, FeatureError> {
    let gray = img.to_grayscale();
    let ii = build_integral(&gray);
    extract_from_integral(&ii, config)
}
