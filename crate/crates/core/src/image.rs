//! Raster and grayscale images.
//!
//! Images are row-major with the origin at the top-left pixel. Pixel
//! coordinates refer to pixel centers, so `(x, y)` is column `x`, row `y`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("pixel buffer holds {actual} pixels but {width}x{height} needs {expected}")]
    BufferSize {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::EmptyImage { width, height });
    }
    let expected = width * height;
    if len != expected {
        return Err(ImageError::BufferSize {
            width,
            height,
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// An 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, ImageError> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Builds an RGB image whose three channels all carry the gray value.
    pub fn from_gray(gray: &GrayImage) -> Self {
        Self {
            width: gray.width,
            height: gray.height,
            pixels: gray.values.iter().map(|&v| [v, v, v]).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    /// Sets a pixel; coordinates outside the image are ignored.
    pub fn put_pixel(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = rgb;
        }
    }

    pub fn to_grayscale(&self) -> GrayImage {
        to_grayscale(self)
    }
}

/// An 8-bit luminance image.
///
/// The unit-scaled view of each pixel is `value / 255`, computed on demand so
/// the two representations can never disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, ImageError> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn value(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }

    /// Luminance scaled to `[0, 1]`.
    pub fn unit(&self, x: usize, y: usize) -> f64 {
        f64::from(self.value(x, y)) / 255.0
    }

    /// Applies `v -> clamp(round(gain * v + offset))` to every pixel.
    pub fn map_affine(&self, gain: f64, offset: f64) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            values: self
                .values
                .iter()
                .map(|&v| (gain * f64::from(v) + offset).round().clamp(0.0, 255.0) as u8)
                .collect(),
        }
    }
}

/// BT.601 luminance, rounded half-up and clamped to `[0, 255]`.
pub fn luminance(rgb: [u8; 3]) -> u8 {
    let [r, g, b] = rgb.map(f64::from);
    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    (y + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn to_grayscale(img: &RasterImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        values: img.pixels.iter().map(|&p| luminance(p)).collect(),
    }
}
