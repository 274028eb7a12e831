//! Grayscale conversion and constant-time box sums.
//!
//! cargo run --example grayscale_integral

use arfex::image::RasterImage;
use arfex::integral::{build_integral, Rect};

fn main() {
    let img =
        RasterImage::new(4, 3, (0..12).map(|i| [i * 20, 255 - i * 20, 60]).collect()).unwrap();
    let gray = img.to_grayscale();
    println!("gray levels:");
    for y in 0..gray.height() {
        let row: Vec<u8> = (0..gray.width()).map(|x| gray.value(x, y)).collect();
        println!("  {row:?}");
    }

    let ii = build_integral(&gray);
    let full = Rect::new(0, 0, 3, 2);
    let inner = Rect::with_size(1, 1, 2, 2);
    println!("sum over the whole image: {:.6}", ii.box_sum(full));
    println!("sum over 2x2 at (1, 1):   {:.6}", ii.box_sum(inner));
    // Rectangles are clipped to the image, so out-of-range corners are fine.
    println!(
        "clipped rectangle:        {:.6}",
        ii.box_sum(Rect::new(-5, -5, 1, 0))
    );
    println!("Haar x at (2, 1), side 2: {:.6}", ii.haar_x(2, 1, 2));
}
