//! Scanline blob labeling on a thresholded image.
//!
//! cargo run --example blob_detection

use arfex::blobs::{blob_report, detect_lineblobs, BlobConfig, Polarity};
use arfex::image::GrayImage;

const PICTURE: [&str; 8] = [
    "..........##....",
    ".####.....##....",
    ".#..#...........",
    ".####.....#####.",
    "..........#...#.",
    "...##.....#.#.#.",
    "...##.....#####.",
    "................",
];

fn main() {
    let gray = GrayImage::from_fn(16, 8, |x, y| {
        if PICTURE[y].as_bytes()[x] == b'#' {
            230
        } else {
            20
        }
    })
    .unwrap();

    let row3: Vec<bool> = (0..16).map(|x| gray.value(x, 3) >= 128).collect();
    println!("runs on row 3: {:?}", detect_lineblobs(&row3, 3, 0));

    let report = blob_report(&gray, &BlobConfig::default());
    println!("{} white blobs:", report.blobs.len());
    for b in &report.blobs {
        println!(
            "  {:>2} px, bbox {:?}, centroid ({:.2}, {:.2})",
            b.pixel_count, b.bbox, b.centroid[0], b.centroid[1]
        );
    }

    let dark = BlobConfig {
        polarity: Polarity::Black,
        min_pixels: 2,
        ..Default::default()
    };
    let report = blob_report(&gray, &dark);
    println!("{} black blobs of at least 2 px", report.blobs.len());
    println!(
        "{}",
        serde_json::to_string_pretty(&report.blobs[0]).unwrap()
    );
}
