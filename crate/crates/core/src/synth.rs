//! Deterministic synthetic scenes for tests, examples and benchmarks.
//!
//! A [`BlobField`] is an analytic image made of Gaussian blobs on a flat
//! background. Because it is analytic it can be rendered directly under any
//! geometric transform, so a rotated or scaled view carries no resampling
//! blur and its ground-truth mapping is known exactly.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::{Homography, Point};
use crate::image::{GrayImage, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBlob {
    pub cx: f64,
    pub cy: f64,
    /// Standard deviation along the major axis.
    pub sigma: f64,
    /// Major over minor standard deviation, at least 1.
    pub aspect: f64,
    /// Direction of the major axis, radians.
    pub angle: f64,
    /// Signed contrast on the `[0, 1]` luminance scale.
    pub amplitude: f64,
}

impl GaussianBlob {
    pub fn round(cx: f64, cy: f64, sigma: f64, amplitude: f64) -> Self {
        Self {
            cx,
            cy,
            sigma,
            aspect: 1.0,
            angle: 0.0,
            amplitude,
        }
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let (s, c) = self.angle.sin_cos();
        let u = (dx * c + dy * s) / self.sigma;
        let v = (dy * c - dx * s) * self.aspect / self.sigma;
        let r2 = u * u + v * v;
        if r2 < 50.0 {
            self.amplitude * (-0.5 * r2).exp()
        } else {
            0.0
        }
    }
}

/// Parameters for [`BlobField::random_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub width: usize,
    pub height: usize,
    pub count: usize,
    pub sigma_range: (f64, f64),
    pub aspect_range: (f64, f64),
    /// Range of |amplitude|; the sign is drawn at random.
    pub contrast_range: (f64, f64),
    pub background: f64,
    /// Blob centers are drawn uniformly inside a disc of this radius, in
    /// pixels, around the image center.
    pub disc_radius: f64,
}

/// Disc area per blob in [`FieldSpec::new`]. Isolated blobs are nearly
/// symmetric and have no stable orientation; at this density most blobs
/// overlap a neighbor.
pub const AREA_PER_BLOB: f64 = 400.0;

impl FieldSpec {
    /// Blobs at a fixed density, so the disc grows with `count` up to 45%
    /// of the shorter side.
    pub fn new(width: usize, height: usize, count: usize) -> Self {
        let max_radius = 0.45 * width.min(height) as f64;
        Self {
            width,
            height,
            count,
            sigma_range: (3.0, 8.0),
            aspect_range: (1.0, 1.0),
            contrast_range: (0.15, 0.35),
            background: 0.45,
            disc_radius: (count as f64 * AREA_PER_BLOB / PI).sqrt().min(max_radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobField {
    pub width: usize,
    pub height: usize,
    pub background: f64,
    pub blobs: Vec<GaussianBlob>,
}

impl BlobField {
    pub fn random(width: usize, height: usize, count: usize, seed: u64) -> Self {
        Self::random_with(&FieldSpec::new(width, height, count), seed)
    }

    pub fn random_with(spec: &FieldSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (cx, cy) = center(spec.width, spec.height);
        let blobs = (0..spec.count)
            .map(|_| {
                let r = spec.disc_radius * rng.random::<f64>().sqrt();
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                let contrast = rng.random_range(spec.contrast_range.0..=spec.contrast_range.1);
                GaussianBlob {
                    cx: cx + r * t.cos(),
                    cy: cy + r * t.sin(),
                    sigma: rng.random_range(spec.sigma_range.0..=spec.sigma_range.1),
                    aspect: rng.random_range(spec.aspect_range.0..=spec.aspect_range.1),
                    angle: rng.random_range(0.0..PI),
                    amplitude: if rng.random::<bool>() {
                        contrast
                    } else {
                        -contrast
                    },
                }
            })
            .collect();
        Self {
            width: spec.width,
            height: spec.height,
            background: spec.background,
            blobs,
        }
    }

    /// Luminance at a real-valued position, clamped to `[0, 1]`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let v = self.background + self.blobs.iter().map(|b| b.value(x, y)).sum::<f64>();
        v.clamp(0.0, 1.0)
    }

    pub fn render_gray(&self) -> GrayImage {
        self.render_gray_warped(&Homography::identity(), self.width, self.height)
    }

    pub fn render(&self) -> RasterImage {
        RasterImage::from_gray(&self.render_gray())
    }

    /// Renders the field as seen after applying `warp` (field coordinates
    /// to output pixels) onto a `width x height` canvas.
    pub fn render_gray_warped(&self, warp: &Homography, width: usize, height: usize) -> GrayImage {
        let inv = warp.inverse().expect("warp must be invertible");
        GrayImage::from_fn(width, height, |x, y| {
            let v = match inv.project((x as f64, y as f64)) {
                Ok((fx, fy)) => self.value(fx, fy),
                Err(_) => self.background,
            };
            to_u8(v)
        })
        .expect("non-empty canvas")
    }

    pub fn render_warped(&self, warp: &Homography, width: usize, height: usize) -> RasterImage {
        RasterImage::from_gray(&self.render_gray_warped(warp, width, height))
    }
}

fn to_u8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Pixel-center midpoint of a `width x height` image.
pub fn center(width: usize, height: usize) -> Point {
    ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0)
}

/// Rotation by `angle` radians and uniform `scale` about the image center.
pub fn rotation_about_center(width: usize, height: usize, angle: f64, scale: f64) -> Homography {
    let c = center(width, height);
    Homography::similarity(angle, scale, c, c)
}

/// Adds zero-mean Gaussian noise with standard deviation `sigma` (in 8-bit
/// units) to every channel, clamping the result.
pub fn add_gaussian_noise(img: &RasterImage, sigma: f64, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let pixels = img
        .pixels()
        .iter()
        .map(|p| {
            let n: f64 = normal.sample(&mut rng);
            p.map(|c| (f64::from(c) + n).round().clamp(0.0, 255.0) as u8)
        })
        .collect();
    RasterImage::new(img.width(), img.height(), pixels).expect("same dimensions")
}

/// Independent uniform gray levels at every pixel.
pub fn uniform_noise(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gray = GrayImage::from_fn(width, height, |_, _| rng.random()).expect("non-empty");
    RasterImage::from_gray(&gray)
}
