use super::orientation::haar_side;
use super::{DescriptorParams, InterestPoint, LaplacianSign};
use crate::integral::IntegralImage;

pub const DESCRIPTOR_LEN: usize = 64;

/// Gaussian-weighted Haar statistics over a 4x4 grid around a point.
///
/// Each subregion contributes `(sum dx, sum dy, sum |dx|, sum |dy|)` in the
/// point's rotated frame. The vector is unit length, or all zeros when the
/// patch has no gradient at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Descriptor {
    pub components: [f64; DESCRIPTOR_LEN],
    pub laplacian_sign: LaplacianSign,
}

impl Descriptor {
    /// Normalizes `components` to unit length, leaving a zero vector as is.
    pub fn normalized(
        mut components: [f64; DESCRIPTOR_LEN],
        laplacian_sign: LaplacianSign,
    ) -> Self {
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            components.iter_mut().for_each(|c| *c /= norm);
        }
        Self {
            components,
            laplacian_sign,
        }
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0.0)
    }
}

impl TryFrom<(&[f64], LaplacianSign)> for Descriptor {
    type Error = usize;

    /// Fails with the slice length when it is not 64.
    fn try_from((values, laplacian_sign): (&[f64], LaplacianSign)) -> Result<Self, usize> {
        let components: [f64; DESCRIPTOR_LEN] = values.try_into().map_err(|_| values.len())?;
        Ok(Self {
            components,
            laplacian_sign,
        })
    }
}

pub fn extract_descriptor(
    ii: &IntegralImage,
    ip: &InterestPoint,
    upright: bool,
    params: &DescriptorParams,
) -> Descriptor {
    let (sin, cos) = if upright {
        (0.0, 1.0)
    } else {
        ip.orientation.sin_cos()
    };
    let s = ip.scale;
    let per_side = params.subregions * params.samples;
    let spacing = params.window / per_side as f64 * s;
    let center = per_side as f64 / 2.0;
    let side = haar_side(params.haar_size, s);
    let two_sigma2 = 2.0 * (params.sigma * s).powi(2);

    let mut raw = [0.0; DESCRIPTOR_LEN];
    for l in 0..per_side {
        let v = (l as f64 + 0.5 - center) * spacing;
        for k in 0..per_side {
            let u = (k as f64 + 0.5 - center) * spacing;
            let px = (ip.x + u * cos - v * sin).round() as i64;
            let py = (ip.y + u * sin + v * cos).round() as i64;
            let dx = ii.haar_x(px, py, side);
            let dy = ii.haar_y(px, py, side);
            if dx == 0.0 && dy == 0.0 {
                continue;
            }
            let w = (-(u * u + v * v) / two_sigma2).exp();
            let rx = w * (dx * cos + dy * sin);
            let ry = w * (-dx * sin + dy * cos);
            let cell = (l / params.samples) * params.subregions + k / params.samples;
            let slot = &mut raw[4 * cell..4 * cell + 4];
            slot[0] += rx;
            slot[1] += ry;
            slot[2] += rx.abs();
            slot[3] += ry.abs();
        }
    }
    Descriptor::normalized(raw, ip.laplacian_sign)
}
