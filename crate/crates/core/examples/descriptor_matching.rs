//! Matching descriptors between an image and a rotated copy.
//!
//! cargo run --example descriptor_matching

use arfex::features::{extract_features, ExtractionConfig};
use arfex::matching::{match_descriptors, MatchConfig};
use arfex::synth::{rotation_about_center, BlobField};

fn main() {
    let field = BlobField::random(256, 256, 40, 3);
    let warp = rotation_about_center(256, 256, 30f64.to_radians(), 1.0);
    let cfg = ExtractionConfig::default();
    let a = extract_features(&field.render(), &cfg).unwrap();
    let b = extract_features(&field.render_warped(&warp, 256, 256), &cfg).unwrap();
    println!(
        "{} points in the original, {} in the rotated view",
        a.len(),
        b.len()
    );

    for ratio in [0.5, 0.7, 0.9] {
        let matches = match_descriptors(
            &a.descriptors,
            &b.descriptors,
            &MatchConfig {
                ratio_threshold: ratio,
                ..Default::default()
            },
        );
        let correct = matches
            .iter()
            .filter(|m| {
                let p = &a.points[m.query_index];
                let q = &b.points[m.target_index];
                let (x, y) = warp.project((p.x, p.y)).unwrap();
                (q.x - x).hypot(q.y - y) < 3.0
            })
            .count();
        println!(
            "ratio {ratio}: {} matches, {correct} land within 3 px of the true position",
            matches.len()
        );
    }

    let upright = ExtractionConfig {
        upright: true,
        ..cfg
    };
    let a = extract_features(&field.render(), &upright).unwrap();
    let b = extract_features(&field.render_warped(&warp, 256, 256), &upright).unwrap();
    let m = match_descriptors(&a.descriptors, &b.descriptors, &MatchConfig::default());
    println!(
        "upright descriptors under the same rotation: {} matches",
        m.len()
    );
}
