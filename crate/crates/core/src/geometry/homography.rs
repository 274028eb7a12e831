use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use super::GeometryError;

pub type Point = (f64, f64);

/// Planar projective transform, normalized so the bottom-right entry is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 9]", into = "[f64; 9]")]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self {
            m: Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0),
        }
    }

    /// `p -> scale * R(angle) * (p - from) + to`.
    pub fn similarity(angle: f64, scale: f64, from: Point, to: Point) -> Self {
        let (s, c) = angle.sin_cos();
        let (a, b) = (scale * c, scale * s);
        let tx = to.0 - (a * from.0 - b * from.1);
        let ty = to.1 - (b * from.0 + a * from.1);
        Self {
            m: Matrix3::new(a, -b, tx, b, a, ty, 0.0, 0.0, 1.0),
        }
    }

    /// Normalizes `m` by its bottom-right entry and checks invertibility.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        let h33 = m[(2, 2)];
        if !h33.is_finite() || h33.abs() < 1e-12 {
            return Err(GeometryError::SingularSystem);
        }
        let m = m / h33;
        if m.iter().any(|v| !v.is_finite()) || m.determinant().abs() <= 1e-12 {
            return Err(GeometryError::SingularSystem);
        }
        Ok(Self { m })
    }

    pub fn from_row_major(v: [f64; 9]) -> Result<Self, GeometryError> {
        Self::from_matrix(Matrix3::from_row_slice(&v))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                out[3 * r + c] = self.m[(r, c)];
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        let inv = self.m.try_inverse().ok_or(GeometryError::SingularSystem)?;
        Self::from_matrix(inv)
    }

    /// Applies the transform with the perspective divide.
    pub fn project(&self, p: Point) -> Result<Point, GeometryError> {
        let v = self.m * Vector3::new(p.0, p.1, 1.0);
        if v.z.abs() <= 1e-12 {
            return Err(GeometryError::PointAtInfinity);
        }
        Ok((v.x / v.z, v.y / v.z))
    }

    /// Euclidean distance between the projection of `src` and `dst`;
    /// infinite when `src` maps to infinity.
    pub fn transfer_error(&self, src: Point, dst: Point) -> f64 {
        match self.project(src) {
            Ok(p) => ((p.0 - dst.0).powi(2) + (p.1 - dst.1).powi(2)).sqrt(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl From<Homography> for [f64; 9] {
    fn from(h: Homography) -> Self {
        h.to_row_major()
    }
}

impl TryFrom<[f64; 9]> for Homography {
    type Error = GeometryError;

    fn try_from(v: [f64; 9]) -> Result<Self, GeometryError> {
        Self::from_row_major(v)
    }
}

pub fn project_point(h: &Homography, p: Point) -> Result<Point, GeometryError> {
    h.project(p)
}

/// Twice the signed area of the triangle `a b c`.
fn doubled_area(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Affine map taking the bounding box of `points` onto the unit square
/// (aspect preserved), as `(offset_x, offset_y, scale)`.
fn unit_box(points: &[Point]) -> (f64, f64, f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in points {
        x0 = x0.min(p.0);
        y0 = y0.min(p.1);
        x1 = x1.max(p.0);
        y1 = y1.max(p.1);
    }
    let extent = (x1 - x0).max(y1 - y0);
    let scale = if extent > 0.0 { 1.0 / extent } else { 1.0 };
    (x0, y0, scale)
}

fn scaled(points: &[Point], t: (f64, f64, f64)) -> Vec<Point> {
    points
        .iter()
        .map(|p| ((p.0 - t.0) * t.2, (p.1 - t.1) * t.2))
        .collect()
}

fn box_matrix(t: (f64, f64, f64)) -> Matrix3<f64> {
    Matrix3::new(t.2, 0.0, -t.0 * t.2, 0.0, t.2, -t.1 * t.2, 0.0, 0.0, 1.0)
}

/// True when some triple of the (unit-scaled) points is collinear within
/// `tol`, for the minimal four-point case; for larger sets, when all points
/// lie on one line.
pub(crate) fn is_degenerate(points: &[Point], tol: f64) -> bool {
    let t = unit_box(points);
    let p = scaled(points, t);
    if p.len() == 4 {
        return [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
            .iter()
            .any(|&(a, b, c)| doubled_area(p[a], p[b], p[c]).abs() / 2.0 <= tol);
    }
    // Largest triangle spanned by the extreme points of the set.
    let far = |from: Point| {
        p.iter()
            .copied()
            .max_by(|a, b| {
                let da = (a.0 - from.0).powi(2) + (a.1 - from.1).powi(2);
                let db = (b.0 - from.0).powi(2) + (b.1 - from.1).powi(2);
                da.total_cmp(&db)
            })
            .unwrap_or(from)
    };
    let a = p[0];
    let b = far(a);
    let max_area = p
        .iter()
        .map(|&c| doubled_area(a, b, c).abs() / 2.0)
        .fold(0.0, f64::max);
    max_area <= tol
}

/// Direct linear transform with `h33 = 1`.
///
/// Four correspondences give an exact 8x8 solve; more are fitted in the
/// least-squares sense. Both point sets are mapped into the unit square
/// first to keep the system well conditioned.
pub fn estimate_homography(src: &[Point], dst: &[Point]) -> Result<Homography, GeometryError> {
    let n = src.len();
    if n < 4 || dst.len() != n {
        return Err(GeometryError::InsufficientMatches {
            needed: 4,
            got: n.min(dst.len()),
        });
    }
    if is_degenerate(src, 1e-9) {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let ts = unit_box(src);
    let td = unit_box(dst);
    let s = scaled(src, ts);
    let d = scaled(dst, td);

    let h = if n == 4 {
        let mut a = SMatrix::<f64, 8, 8>::zeros();
        let mut b = SVector::<f64, 8>::zeros();
        for i in 0..4 {
            fill_rows(&mut |r, c, v| a[(2 * i + r, c)] = v, s[i], d[i]);
            b[2 * i] = d[i].0;
            b[2 * i + 1] = d[i].1;
        }
        let sol = a.lu().solve(&b).ok_or(GeometryError::SingularSystem)?;
        DVector::from_column_slice(sol.as_slice())
    } else {
        let mut a = DMatrix::<f64>::zeros(2 * n, 8);
        let mut b = DVector::<f64>::zeros(2 * n);
        for i in 0..n {
            fill_rows(&mut |r, c, v| a[(2 * i + r, c)] = v, s[i], d[i]);
            b[2 * i] = d[i].0;
            b[2 * i + 1] = d[i].1;
        }
        let svd = a.svd(true, true);
        let max_sv = svd.singular_values.max();
        // Also rejects NaN singular values.
        if svd.singular_values.min().partial_cmp(&(1e-12 * max_sv))
            != Some(std::cmp::Ordering::Greater)
        {
            return Err(GeometryError::SingularSystem);
        }
        svd.solve(&b, 0.0)
            .map_err(|_| GeometryError::SingularSystem)?
    };
    if h.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::SingularSystem);
    }
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0);
    let dst_inv = box_matrix(td)
        .try_inverse()
        .ok_or(GeometryError::SingularSystem)?;
    Homography::from_matrix(dst_inv * hn * box_matrix(ts))
}

/// The two DLT rows of one correspondence with `h33` moved to the right.
fn fill_rows(set: &mut impl FnMut(usize, usize, f64), s: Point, d: Point) {
    let (x, y) = s;
    let (u, v) = d;
    for (c, val) in [x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]
        .into_iter()
        .enumerate()
    {
        set(0, c, val);
    }
    for (c, val) in [0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]
        .into_iter()
        .enumerate()
    {
        set(1, c, val);
    }
}

/// Least-squares similarity `[a -b tx; b a ty]` from two or more pairs.
pub fn estimate_similarity(src: &[Point], dst: &[Point]) -> Result<Homography, GeometryError> {
    let n = src.len();
    if n < 2 || dst.len() != n {
        return Err(GeometryError::InsufficientMatches {
            needed: 2,
            got: n.min(dst.len()),
        });
    }
    let mean = |p: &[Point]| {
        let (sx, sy) = p.iter().fold((0.0, 0.0), |a, q| (a.0 + q.0, a.1 + q.1));
        (sx / n as f64, sy / n as f64)
    };
    let (ms, md) = (mean(src), mean(dst));
    let (mut sxx, mut a_num, mut b_num) = (0.0, 0.0, 0.0);
    for (s, d) in src.iter().zip(dst) {
        let (x, y) = (s.0 - ms.0, s.1 - ms.1);
        let (u, v) = (d.0 - md.0, d.1 - md.1);
        sxx += x * x + y * y;
        a_num += x * u + y * v;
        b_num += x * v - y * u;
    }
    if sxx <= 1e-18 {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let (a, b) = (a_num / sxx, b_num / sxx);
    let tx = md.0 - (a * ms.0 - b * ms.1);
    let ty = md.1 - (b * ms.0 + a * ms.1);
    Homography::from_matrix(Matrix3::new(a, -b, tx, b, a, ty, 0.0, 0.0, 1.0))
}
