//! Augmented-reality overlay: outline a recognized object in the view.
//!
//! cargo run --example overlay [-- OUT_DIR]

use std::path::PathBuf;

use arfex::draw::recognition_overlay;
use arfex::io::write_ppm;
use arfex::store::{index_image, query_image, Database, QueryConfig};
use arfex::synth::{rotation_about_center, BlobField};

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let object = BlobField::random(160, 160, 40, 11);
    let db = index_image(
        &Database::default(),
        &object.render(),
        "sign",
        "Exit sign",
        "Emergency exit, 20 m",
    )
    .unwrap();

    let view = rotation_about_center(160, 160, (-20f64).to_radians(), 0.75);
    let frame = object.render_warped(&view, 160, 160);
    let result = query_image(&db, &frame, &QueryConfig::default()).unwrap();
    let Some(corners) = result.frame else {
        println!("object not recognized");
        return;
    };
    println!("{} recognized; projected corners:", result.best);
    for (c, truth) in corners
        .iter()
        .zip([(0.0, 0.0), (159.0, 0.0), (159.0, 159.0), (0.0, 159.0)])
    {
        let t = view.project(truth).unwrap();
        println!(
            "  ({:7.2}, {:7.2})  true ({:7.2}, {:7.2})",
            c.0, c.1, t.0, t.1
        );
    }
    let path = out_dir.join("recognized.ppm");
    write_ppm(
        &path,
        &recognition_overlay(&frame, &result.inlier_points, Some(&corners)),
    )
    .unwrap();
    println!(
        "overlay with {} inliers written to {}",
        result.inlier_points.len(),
        path.display()
    );
}
