//! One-pixel red overlays: keypoint circles and recognition frames.

use crate::features::InterestPoint;
use crate::geometry::Point;
use crate::image::RasterImage;

pub const RED: [u8; 3] = [255, 0, 0];

/// Circle radius relative to the keypoint scale.
pub const KEYPOINT_RADIUS_FACTOR: f64 = 2.5;

/// Midpoint circle; pixels outside the image are skipped.
pub fn draw_circle(img: &mut RasterImage, cx: i64, cy: i64, radius: i64, rgb: [u8; 3]) {
    if radius < 0 {
        return;
    }
    let (mut x, mut y) = (radius, 0i64);
    let mut err = 1 - radius;
    while x >= y {
        for (dx, dy) in [
            (x, y),
            (y, x),
            (-y, x),
            (-x, y),
            (-x, -y),
            (-y, -x),
            (y, -x),
            (x, -y),
        ] {
            img.put_pixel(cx + dx, cy + dy, rgb);
        }
        y += 1;
        if err < 0 {
            err += 2 * y + 1;
        } else {
            x -= 1;
            err += 2 * (y - x) + 1;
        }
    }
}

/// Bresenham line, both endpoints included.
pub fn draw_line(img: &mut RasterImage, from: (i64, i64), to: (i64, i64), rgb: [u8; 3]) {
    let (mut x, mut y) = from;
    let dx = (to.0 - x).abs();
    let dy = -(to.1 - y).abs();
    let sx = if x < to.0 { 1 } else { -1 };
    let sy = if y < to.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        img.put_pixel(x, y, rgb);
        if (x, y) == to {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

fn pixel(p: Point) -> (i64, i64) {
    (p.0.round() as i64, p.1.round() as i64)
}

/// Circle of radius 2.5 x scale with a radius tick along the orientation.
pub fn draw_keypoint(img: &mut RasterImage, ip: &InterestPoint) {
    let r = KEYPOINT_RADIUS_FACTOR * ip.scale;
    let c = pixel((ip.x, ip.y));
    draw_circle(img, c.0, c.1, r.round() as i64, RED);
    let tip = pixel((
        ip.x + r * ip.orientation.cos(),
        ip.y + r * ip.orientation.sin(),
    ));
    draw_line(img, c, tip, RED);
}

pub fn keypoint_overlay(img: &RasterImage, points: &[InterestPoint]) -> RasterImage {
    let mut out = img.clone();
    for ip in points {
        draw_keypoint(&mut out, ip);
    }
    out
}

pub fn draw_polygon(img: &mut RasterImage, corners: &[Point], rgb: [u8; 3]) {
    for (i, &a) in corners.iter().enumerate() {
        let b = corners[(i + 1) % corners.len()];
        draw_line(img, pixel(a), pixel(b), rgb);
    }
}

/// Marks each inlier with a small circle and outlines the recognized frame.
pub fn recognition_overlay(
    img: &RasterImage,
    inliers: &[Point],
    frame: Option<&[Point; 4]>,
) -> RasterImage {
    let mut out = img.clone();
    for &p in inliers {
        let c = pixel(p);
        draw_circle(&mut out, c.0, c.1, 3, RED);
    }
    if let Some(frame) = frame {
        draw_polygon(&mut out, frame, RED);
    }
    out
}
