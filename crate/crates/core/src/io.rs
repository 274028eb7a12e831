//! Image file I/O: binary PPM/PGM (P6/P5) read and write, PNG read.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::image::{GrayImage, RasterImage};

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported image format (expected binary PPM/PGM or PNG)")]
    UnsupportedFormat,
    #[error("malformed PNM file: {0}")]
    MalformedPnm(&'static str),
    #[error("PNG decode failed: {0}")]
    Png(String),
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

pub fn read_image(path: impl AsRef<Path>) -> Result<RasterImage, ImageIoError> {
    decode_image(&fs::read(path)?)
}

/// Decodes PNG or binary PNM bytes, sniffing the format from the header.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage, ImageIoError> {
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") || bytes.starts_with(b"P5") {
        decode_pnm(bytes)
    } else {
        Err(ImageIoError::UnsupportedFormat)
    }
}

fn decode_png(bytes: &[u8]) -> Result<RasterImage, ImageIoError> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| ImageIoError::Png(e.to_string()))?
        .into_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| p.0).collect();
    RasterImage::new(w as usize, h as usize, pixels).map_err(|e| ImageIoError::Png(e.to_string()))
}

struct Header<'a> {
    rest: &'a [u8],
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        loop {
            match self.rest.first() {
                Some(c) if c.is_ascii_whitespace() => self.rest = &self.rest[1..],
                Some(b'#') => {
                    let end = self
                        .rest
                        .iter()
                        .position(|&c| c == b'\n')
                        .unwrap_or(self.rest.len());
                    self.rest = &self.rest[end..];
                }
                _ => return,
            }
        }
    }

    fn number(&mut self) -> Result<usize, ImageIoError> {
        self.skip_space_and_comments();
        let len = self.rest.iter().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return Err(ImageIoError::MalformedPnm(
                "expected a number in the header",
            ));
        }
        let digits = std::str::from_utf8(&self.rest[..len]).expect("ascii digits");
        self.rest = &self.rest[len..];
        digits
            .parse()
            .map_err(|_| ImageIoError::MalformedPnm("header value out of range"))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<RasterImage, ImageIoError> {
    let channels = if bytes[1] == b'6' { 3 } else { 1 };
    let mut header = Header { rest: &bytes[2..] };
    let width = header.number()?;
    let height = header.number()?;
    let maxval = header.number()?;
    if maxval != 255 {
        return Err(ImageIoError::MalformedPnm("only maxval 255 is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match header.rest.first() {
        Some(c) if c.is_ascii_whitespace() => header.rest = &header.rest[1..],
        _ => return Err(ImageIoError::MalformedPnm("missing separator after header")),
    }
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or(ImageIoError::MalformedPnm("dimensions overflow"))?;
    let data = header
        .rest
        .get(..needed)
        .ok_or(ImageIoError::MalformedPnm("truncated pixel data"))?;
    let result = if channels == 3 {
        let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        RasterImage::new(width, height, pixels)
    } else {
        GrayImage::new(width, height, data.to_vec()).map(|g| RasterImage::from_gray(&g))
    };
    result.map_err(|_| ImageIoError::MalformedPnm("zero-sized image"))
}

pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.reserve(img.pixels().len() * 3);
    for p in img.pixels() {
        out.extend_from_slice(p);
    }
    out
}

pub fn write_ppm(path: impl AsRef<Path>, img: &RasterImage) -> Result<(), ImageIoError> {
    fs::write(path, encode_ppm(img))?;
    Ok(())
}
