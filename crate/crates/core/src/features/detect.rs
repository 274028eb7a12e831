use std::cmp::Ordering;

use nalgebra::{Matrix3, Vector3};

use super::{InterestPoint, ResponseMap};

/// A strict 3x3x3 maximum on the response-map grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extremum {
    /// Index of the map the maximum sits in; its neighbors in scale are
    /// `map - 1` and `map + 1`.
    pub map: usize,
    pub col: usize,
    pub row: usize,
}

fn same_octave(a: &ResponseMap, b: &ResponseMap) -> bool {
    a.octave == b.octave && a.stride == b.stride && a.cols == b.cols && a.rows == b.rows
}

/// Grid cells whose response exceeds `threshold` and all 26 neighbors.
///
/// Only the inner intervals of an octave are searched; the first and last
/// act as comparison layers. A cell is skipped when the largest filter of
/// its triple would reach past the image border, since clipped filters
/// produce edge artifacts rather than image structure.
pub fn find_extrema(maps: &[ResponseMap], threshold: f64) -> Vec<Extremum> {
    let mut found = Vec::new();
    for m in 1..maps.len().saturating_sub(1) {
        let (below, mid, above) = (&maps[m - 1], &maps[m], &maps[m + 1]);
        if !same_octave(below, mid) || !same_octave(mid, above) {
            continue;
        }
        let reach = (above.filter_size - 1) / 2;
        for row in 1..mid.rows.saturating_sub(1) {
            let py = row * mid.stride;
            if py < reach || py + reach >= mid.image_height {
                continue;
            }
            for col in 1..mid.cols.saturating_sub(1) {
                let px = col * mid.stride;
                if px < reach || px + reach >= mid.image_width {
                    continue;
                }
                let v = mid.response(col, row);
                if v <= threshold {
                    continue;
                }
                if is_strict_max(v, [below, mid, above], col, row) {
                    found.push(Extremum { map: m, col, row });
                }
            }
        }
    }
    found
}

fn is_strict_max(v: f64, layers: [&ResponseMap; 3], col: usize, row: usize) -> bool {
    for (li, layer) in layers.iter().enumerate() {
        for r in row - 1..=row + 1 {
            for c in col - 1..=col + 1 {
                if li == 1 && r == row && c == col {
                    continue;
                }
                if layer.response(c, r) >= v {
                    return false;
                }
            }
        }
    }
    true
}

/// Refines an extremum with one quadratic-interpolation step in
/// `(x, y, scale)`. Returns `None` when the fit is singular or moves the
/// point by more than half a grid cell along any axis.
pub fn refine_extremum(maps: &[ResponseMap], e: &Extremum) -> Option<InterestPoint> {
    let (below, mid, above) = (&maps[e.map - 1], &maps[e.map], &maps[e.map + 1]);
    let (c, r) = (e.col, e.row);
    let v = mid.response(c, r);

    let dx = (mid.response(c + 1, r) - mid.response(c - 1, r)) / 2.0;
    let dy = (mid.response(c, r + 1) - mid.response(c, r - 1)) / 2.0;
    let ds = (above.response(c, r) - below.response(c, r)) / 2.0;

    let dxx = mid.response(c + 1, r) + mid.response(c - 1, r) - 2.0 * v;
    let dyy = mid.response(c, r + 1) + mid.response(c, r - 1) - 2.0 * v;
    let dss = above.response(c, r) + below.response(c, r) - 2.0 * v;
    let dxy =
        (mid.response(c + 1, r + 1) - mid.response(c - 1, r + 1) - mid.response(c + 1, r - 1)
            + mid.response(c - 1, r - 1))
            / 4.0;
    let dxs = (above.response(c + 1, r) - above.response(c - 1, r) - below.response(c + 1, r)
        + below.response(c - 1, r))
        / 4.0;
    let dys = (above.response(c, r + 1) - above.response(c, r - 1) - below.response(c, r + 1)
        + below.response(c, r - 1))
        / 4.0;

    let hessian = Matrix3::new(dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss);
    let gradient = Vector3::new(dx, dy, ds);
    let offset = -(hessian.try_inverse()? * gradient);
    if offset.iter().any(|o| !o.is_finite() || o.abs() > 0.5) {
        return None;
    }

    let stride = mid.stride as f64;
    let size_step = (above.filter_size - mid.filter_size) as f64;
    let x = (c as f64 + offset[0]) * stride;
    let y = (r as f64 + offset[1]) * stride;
    let filter = mid.filter_size as f64 + offset[2] * size_step;
    Some(InterestPoint {
        x,
        y,
        scale: 1.2 * filter / 9.0,
        orientation: 0.0,
        laplacian_sign: mid.laplacian_sign(c, r),
        response: v,
    })
}

/// Total order used for detector output: strongest first, then by
/// position and scale.
pub(crate) fn point_order(a: &InterestPoint, b: &InterestPoint) -> Ordering {
    b.response
        .total_cmp(&a.response)
        .then(a.y.total_cmp(&b.y))
        .then(a.x.total_cmp(&b.x))
        .then(a.scale.total_cmp(&b.scale))
}

/// Detects interest points as refined 3x3x3 response maxima above
/// `threshold`, sorted by descending response.
pub fn detect_interest_points(maps: &[ResponseMap], threshold: f64) -> Vec<InterestPoint> {
    let mut points: Vec<InterestPoint> = find_extrema(maps, threshold)
        .iter()
        .filter_map(|e| refine_extremum(maps, e))
        .collect();
    points.sort_by(point_order);
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{build_response_maps, ExtractionConfig};
    use crate::image::GrayImage;
    use crate::integral::build_integral;

    fn blob_image(w: usize, h: usize, blobs: &[(f64, f64, f64)]) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| {
            let mut v = 0.15;
            for &(cx, cy, s) in blobs {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                v += 0.7 * (-d2 / (2.0 * s * s)).exp();
            }
            (v.min(1.0) * 255.0).round() as u8
        })
        .unwrap()
    }

    fn detect(g: &GrayImage) -> (Vec<ResponseMap>, Vec<InterestPoint>) {
        let cfg = ExtractionConfig::default();
        let maps = build_response_maps(&build_integral(g), &cfg).unwrap();
        let pts = detect_interest_points(&maps, cfg.threshold);
        (maps, pts)
    }

    #[test]
    fn constant_image_has_no_points() {
        let (_, pts) = detect(&GrayImage::filled(64, 64, 128).unwrap());
        assert!(pts.is_empty());
    }

    #[test]
    fn single_blob_gives_one_point_at_center() {
        let (_, pts) = detect(&blob_image(128, 128, &[(64.0, 64.0, 3.0)]));
        assert_eq!(pts.len(), 1, "{pts:?}");
        let p = pts[0];
        assert!(((p.x - 64.0).powi(2) + (p.y - 64.0).powi(2)).sqrt() < 2.0);
        assert_eq!(p.laplacian_sign, crate::features::LaplacianSign::Negative);
    }

    #[test]
    fn two_blobs_give_two_points() {
        let (_, pts) = detect(&blob_image(
            160,
            128,
            &[(40.0, 64.0, 3.0), (120.0, 64.0, 3.0)],
        ));
        assert_eq!(pts.len(), 2, "{pts:?}");
        for center in [40.0, 120.0] {
            assert!(pts
                .iter()
                .any(|p| (p.x - center).abs() < 2.0 && (p.y - 64.0).abs() < 2.0));
        }
    }

    #[test]
    fn extrema_beat_all_neighbors() {
        let g = blob_image(
            96,
            96,
            &[(30.0, 30.0, 2.5), (60.0, 40.0, 4.0), (45.0, 70.0, 3.0)],
        );
        let cfg = ExtractionConfig::default();
        let maps = build_response_maps(&build_integral(&g), &cfg).unwrap();
        let extrema = find_extrema(&maps, cfg.threshold);
        assert!(!extrema.is_empty());
        for e in extrema {
            let v = maps[e.map].response(e.col, e.row);
            assert!(v > cfg.threshold);
            for (m, map) in maps.iter().enumerate().take(e.map + 2).skip(e.map - 1) {
                for r in e.row - 1..=e.row + 1 {
                    for c in e.col - 1..=e.col + 1 {
                        if (m, r, c) != (e.map, e.row, e.col) {
                            assert!(v > map.response(c, r));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn output_is_sorted_by_response() {
        let g = blob_image(
            96,
            96,
            &[(30.0, 30.0, 2.5), (60.0, 40.0, 4.0), (45.0, 70.0, 3.0)],
        );
        let (_, pts) = detect(&g);
        assert!(pts.windows(2).all(|w| point_order(&w[0], &w[1]).is_le()));
    }
}
