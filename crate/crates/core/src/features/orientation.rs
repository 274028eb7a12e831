use std::f64::consts::TAU;

use super::{InterestPoint, OrientationParams};
use crate::integral::IntegralImage;

/// Maps an angle into `[0, 2pi)`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Even Haar side length for a wavelet of `factor * scale` pixels.
pub(crate) fn haar_side(factor: f64, scale: f64) -> i64 {
    let side = (factor * scale).round() as i64;
    (side + side % 2).max(2)
}

/// Assigns the dominant gradient direction around `ip`.
///
/// Haar responses sampled on a disc are weighted by a Gaussian and binned
/// by angle; a sliding sector picks the direction with the largest summed
/// response vector. A patch with no gradient gets orientation 0.
pub fn assign_orientation(
    ii: &IntegralImage,
    ip: &InterestPoint,
    params: &OrientationParams,
) -> InterestPoint {
    let step = ip.scale.round().max(1.0) as i64;
    let cx = ip.x.round() as i64;
    let cy = ip.y.round() as i64;
    let side = haar_side(params.haar_size, ip.scale);
    let reach = params.radius.ceil() as i64;
    let r2 = params.radius * params.radius;
    let two_sigma2 = 2.0 * params.sigma * params.sigma;

    let mut samples = Vec::new();
    for j in -reach..=reach {
        for i in -reach..=reach {
            let d2 = (i * i + j * j) as f64;
            if d2 >= r2 {
                continue;
            }
            let w = (-d2 / two_sigma2).exp();
            let sx = cx + i * step;
            let sy = cy + j * step;
            let dx = w * ii.haar_x(sx, sy, side);
            let dy = w * ii.haar_y(sx, sy, side);
            if dx != 0.0 || dy != 0.0 {
                samples.push((wrap_angle(dy.atan2(dx)), dx, dy));
            }
        }
    }

    let mut best = (0.0, 0.0, 0.0);
    let windows = (TAU / params.step).ceil() as usize;
    for k in 0..windows {
        let start = k as f64 * params.step;
        let (mut sx, mut sy) = (0.0, 0.0);
        for &(angle, dx, dy) in &samples {
            if (angle - start).rem_euclid(TAU) < params.window {
                sx += dx;
                sy += dy;
            }
        }
        let norm = sx * sx + sy * sy;
        if norm > best.0 {
            best = (norm, sx, sy);
        }
    }

    let orientation = if best.0 > 0.0 {
        wrap_angle(best.2.atan2(best.1))
    } else {
        0.0
    };
    InterestPoint { orientation, ..*ip }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::LaplacianSign;
    use crate::image::GrayImage;
    use crate::integral::build_integral;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn point(x: f64, y: f64, scale: f64) -> InterestPoint {
        InterestPoint {
            x,
            y,
            scale,
            orientation: 0.0,
            laplacian_sign: LaplacianSign::Positive,
            response: 1.0,
        }
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn ramp_along_x() {
        let g = GrayImage::from_fn(64, 64, |x, _| (x * 3) as u8).unwrap();
        let ip = assign_orientation(
            &build_integral(&g),
            &point(32.0, 32.0, 2.0),
            &Default::default(),
        );
        assert!(
            angle_diff(ip.orientation, 0.0) < FRAC_PI_6,
            "{}",
            ip.orientation
        );
    }

    #[test]
    fn ramp_along_y() {
        let g = GrayImage::from_fn(64, 64, |_, y| (y * 3) as u8).unwrap();
        let ip = assign_orientation(
            &build_integral(&g),
            &point(32.0, 32.0, 2.0),
            &Default::default(),
        );
        assert!(
            angle_diff(ip.orientation, FRAC_PI_2) < FRAC_PI_6,
            "{}",
            ip.orientation
        );
    }

    #[test]
    fn flat_patch_is_zero() {
        let g = GrayImage::filled(64, 64, 100).unwrap();
        let mut ip = point(32.0, 32.0, 2.0);
        ip.orientation = 1.0;
        let ip = assign_orientation(&build_integral(&g), &ip, &Default::default());
        assert_eq!(ip.orientation, 0.0);
    }

    #[test]
    fn orientation_in_range_and_deterministic() {
        let g = GrayImage::from_fn(64, 64, |x, y| ((x * 7 + y * y * 3) % 251) as u8).unwrap();
        let ii = build_integral(&g);
        let a = assign_orientation(&ii, &point(30.4, 28.7, 2.6), &Default::default());
        let b = assign_orientation(&ii, &point(30.4, 28.7, 2.6), &Default::default());
        assert_eq!(a.orientation.to_bits(), b.orientation.to_bits());
        assert!((0.0..TAU).contains(&a.orientation));
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_angle(-1e-20), 0.0);
        assert!((wrap_angle(-FRAC_PI_2) - 3.0 * FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn haar_sides_are_even() {
        assert_eq!(haar_side(4.0, 1.6), 6);
        assert_eq!(haar_side(2.0, 1.2), 2);
        assert_eq!(haar_side(2.0, 0.1), 2);
    }
}
