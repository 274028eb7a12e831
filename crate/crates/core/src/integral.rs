//! Summed-area table over unit-scaled luminance.
//!
//! The table accumulates the 8-bit values as exact integers and divides by
//! 255 on lookup. Rectangle sums are therefore exact up to one final
//! rounding, and two boxes covering identical content cancel to exactly zero.

use crate::image::GrayImage;

/// Inclusive 2-D prefix sums of a [`GrayImage`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    // (width + 1) x (height + 1), first row and column are zero.
    table: Vec<u64>,
}

/// Inclusive pixel rectangle `x0..=x1`, `y0..=y1`. Coordinates may lie
/// outside the image; lookups clip them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    /// Rectangle with top-left corner `(x, y)` and the given size.
    pub fn with_size(x: i64, y: i64, width: i64, height: i64) -> Self {
        Self::new(x, y, x + width - 1, y + height - 1)
    }
}

impl IntegralImage {
    pub fn new(gray: &GrayImage) -> Self {
        let (w, h) = (gray.width(), gray.height());
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            for x in 0..w {
                row_sum += u64::from(gray.value(x, y));
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
            }
        }
        Self {
            width: w,
            height: h,
            table,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Sum of unit-scaled luminance over all pixels `(i, j)` with `i <= x`
    /// and `j <= y`.
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.raw(x as i64 + 1, y as i64 + 1) as f64 / 255.0
    }

    fn raw(&self, px: i64, py: i64) -> u64 {
        self.table[py as usize * (self.width + 1) + px as usize]
    }

    /// Clipped rectangle sum of the raw 8-bit values.
    pub fn raw_box_sum(&self, rect: Rect) -> i64 {
        let x0 = rect.x0.max(0);
        let y0 = rect.y0.max(0);
        let x1 = rect.x1.min(self.width as i64 - 1);
        let y1 = rect.y1.min(self.height as i64 - 1);
        if x0 > x1 || y0 > y1 {
            return 0;
        }
        let a = self.raw(x0, y0) as i64;
        let b = self.raw(x1 + 1, y0) as i64;
        let c = self.raw(x0, y1 + 1) as i64;
        let d = self.raw(x1 + 1, y1 + 1) as i64;
        d - b - c + a
    }

    /// Sum of unit-scaled luminance inside `rect` after clipping it to the
    /// image. Empty rectangles sum to zero.
    pub fn box_sum(&self, rect: Rect) -> f64 {
        self.raw_box_sum(rect) as f64 / 255.0
    }

    /// Horizontal Haar wavelet of side `size` centered on `(x, y)`: right
    /// half minus left half.
    pub fn haar_x(&self, x: i64, y: i64, size: i64) -> f64 {
        let half = size / 2;
        let right = self.raw_box_sum(Rect::with_size(x, y - half, half, size));
        let left = self.raw_box_sum(Rect::with_size(x - half, y - half, half, size));
        (right - left) as f64 / 255.0
    }

    /// Vertical Haar wavelet of side `size` centered on `(x, y)`: bottom
    /// half minus top half.
    pub fn haar_y(&self, x: i64, y: i64, size: i64) -> f64 {
        let half = size / 2;
        let bottom = self.raw_box_sum(Rect::with_size(x - half, y, size, half));
        let top = self.raw_box_sum(Rect::with_size(x - half, y - half, size, half));
        (bottom - top) as f64 / 255.0
    }
}

pub fn build_integral(gray: &GrayImage) -> IntegralImage {
    IntegralImage::new(gray)
}
