use super::{ExtractionConfig, FeatureError, LaplacianSign, MIN_IMAGE_SIDE};
use crate::integral::{IntegralImage, Rect};

/// Weight applied to `Dxy` to compensate for the box-filter approximation.
const DXY_WEIGHT: f64 = 0.9;

/// Box-filter side length for a 1-based `(octave, interval)`.
///
/// Octave 1 gives 9, 15, 21, 27; each octave doubles the size step.
pub fn filter_size(octave: usize, interval: usize) -> usize {
    3 * ((1 << octave) * interval + 1)
}

/// Box-filter Hessian at one pixel, normalized by the filter area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianSample {
    pub dxx: f64,
    pub dyy: f64,
    pub dxy: f64,
}

impl HessianSample {
    pub fn response(&self) -> f64 {
        let w = DXY_WEIGHT * self.dxy;
        self.dxx * self.dyy - w * w
    }

    pub fn laplacian_sign(&self) -> LaplacianSign {
        LaplacianSign::of(self.dxx + self.dyy)
    }
}

/// Evaluates the three second-derivative box filters of side `size`
/// centered on pixel `(x, y)`.
pub fn hessian_at(ii: &IntegralImage, x: i64, y: i64, size: usize) -> HessianSample {
    let size = size as i64;
    let lobe = size / 3;
    let half = (size - 1) / 2;
    // Lobes are combined on the raw integer sums so that flat regions cancel
    // exactly; the 1/255 unit scaling is folded into the normalization.
    let norm = 1.0 / (255.0 * (size * size) as f64);
    let sum = |x0, y0, x1, y1| ii.raw_box_sum(Rect::new(x0, y0, x1, y1));

    // Three lobes along x with weights +1, -2, +1: the whole band minus
    // three times the middle lobe.
    let dxx = sum(x - half, y - lobe + 1, x + half, y + lobe - 1)
        - 3 * sum(x - lobe / 2, y - lobe + 1, x + lobe / 2, y + lobe - 1);
    let dyy = sum(x - lobe + 1, y - half, x + lobe - 1, y + half)
        - 3 * sum(x - lobe + 1, y - lobe / 2, x + lobe - 1, y + lobe / 2);
    let dxy = sum(x - lobe, y - lobe, x - 1, y - 1) + sum(x + 1, y + 1, x + lobe, y + lobe)
        - sum(x + 1, y - lobe, x + lobe, y - 1)
        - sum(x - lobe, y + 1, x - 1, y + lobe);

    HessianSample {
        dxx: dxx as f64 * norm,
        dyy: dyy as f64 * norm,
        dxy: dxy as f64 * norm,
    }
}

/// Hessian-determinant responses for one `(octave, interval)` of the
/// scale-space, sampled every `stride` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMap {
    pub octave: usize,
    pub interval: usize,
    pub filter_size: usize,
    pub scale_sigma: f64,
    pub stride: usize,
    pub image_width: usize,
    pub image_height: usize,
    pub cols: usize,
    pub rows: usize,
    pub responses: Vec<f64>,
    pub laplacian_signs: Vec<LaplacianSign>,
}

impl ResponseMap {
    pub fn response(&self, col: usize, row: usize) -> f64 {
        self.responses[row * self.cols + col]
    }

    pub fn laplacian_sign(&self, col: usize, row: usize) -> LaplacianSign {
        self.laplacian_signs[row * self.cols + col]
    }

    /// Pixel coordinates of a grid cell.
    pub fn pixel_of(&self, col: usize, row: usize) -> (usize, usize) {
        (col * self.stride, row * self.stride)
    }

    fn compute(ii: &IntegralImage, octave: usize, interval: usize) -> Self {
        let size = filter_size(octave, interval);
        let stride = 1 << (octave - 1);
        let cols = ii.width().div_ceil(stride);
        let rows = ii.height().div_ceil(stride);
        let mut responses = Vec::with_capacity(cols * rows);
        let mut laplacian_signs = Vec::with_capacity(cols * rows);
        for row in 0..rows {
            for col in 0..cols {
                let h = hessian_at(ii, (col * stride) as i64, (row * stride) as i64, size);
                responses.push(h.response());
                laplacian_signs.push(h.laplacian_sign());
            }
        }
        Self {
            octave,
            interval,
            filter_size: size,
            scale_sigma: 1.2 * size as f64 / 9.0,
            stride,
            image_width: ii.width(),
            image_height: ii.height(),
            cols,
            rows,
            responses,
            laplacian_signs,
        }
    }
}

/// Builds one response map per `(octave, interval)`, octave-major.
pub fn build_response_maps(
    ii: &IntegralImage,
    config: &ExtractionConfig,
) -> Result<Vec<ResponseMap>, FeatureError> {
    if ii.width() < MIN_IMAGE_SIDE || ii.height() < MIN_IMAGE_SIDE {
        return Err(FeatureError::ImageTooSmall {
            width: ii.width(),
            height: ii.height(),
        });
    }
    config.validate()?;
    let mut maps = Vec::with_capacity(config.octaves * config.intervals);
    for octave in 1..=config.octaves {
        for interval in 1..=config.intervals {
            maps.push(ResponseMap::compute(ii, octave, interval));
        }
    }
    Ok(maps)
}
