//! Fast-Hessian detection on a synthetic texture, with a keypoint overlay.
//!
//! cargo run --example detect_features [-- OUT_DIR]

use std::path::PathBuf;

use arfex::draw::keypoint_overlay;
use arfex::features::{build_response_maps, extract_features, ExtractionConfig};
use arfex::integral::build_integral;
use arfex::io::write_ppm;
use arfex::synth::BlobField;

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let img = BlobField::random(256, 256, 40, 7).render();
    let cfg = ExtractionConfig::default();

    let maps = build_response_maps(&build_integral(&img.to_grayscale()), &cfg).unwrap();
    for m in maps.iter().filter(|m| m.interval == 1) {
        let peak = m.responses.iter().copied().fold(f64::MIN, f64::max);
        println!(
            "octave {} starts at filter {:>2} (sigma {:.2}, stride {}), peak response {peak:.2e}",
            m.octave, m.filter_size, m.scale_sigma, m.stride
        );
    }

    let features = extract_features(&img, &cfg).unwrap();
    println!("{} interest points; strongest five:", features.len());
    for p in features.points.iter().take(5) {
        println!(
            "  ({:6.2}, {:6.2}) scale {:.2} orientation {:5.1} deg laplacian {:?}",
            p.x,
            p.y,
            p.scale,
            p.orientation.to_degrees(),
            p.laplacian_sign
        );
    }

    let path = out_dir.join("keypoints.ppm");
    write_ppm(&path, &keypoint_overlay(&img, &features.points)).unwrap();
    println!("overlay written to {}", path.display());
}
