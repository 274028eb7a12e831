//! Building an object database, saving it, and recognizing a camera view.
//!
//! cargo run --example recognition_database

use arfex::store::{index_image, load_db, query_image, save_db, Database, QueryConfig};
use arfex::synth::{add_gaussian_noise, rotation_about_center, uniform_noise, BlobField};

fn main() {
    let posters: Vec<BlobField> = (0..4)
        .map(|i| BlobField::random(200, 200, 50, 40 + i))
        .collect();
    let names = ["Concert poster", "Museum map", "Book cover", "Menu board"];

    let mut db = Database::default();
    for (i, (field, name)) in posters.iter().zip(names).enumerate() {
        db = index_image(
            &db,
            &field.render(),
            &format!("item-{i}"),
            name,
            &format!("details for {name}"),
        )
        .unwrap();
    }
    let path = std::env::temp_dir().join("arfex-example-db.json");
    save_db(&db, &path).unwrap();
    let db = load_db(&path).unwrap();
    println!(
        "database with {} objects saved to {}",
        db.records.len(),
        path.display()
    );

    let view = rotation_about_center(200, 200, 12f64.to_radians(), 0.85);
    let camera = add_gaussian_noise(&posters[2].render_warped(&view, 200, 200), 4.0, 1);
    let result = query_image(&db, &camera, &QueryConfig::default()).unwrap();
    println!("best: {}", result.best);
    if let Some(info) = &result.associated_info {
        println!("  {}: {}", info.name, info.info);
    }
    for c in &result.ranked {
        println!(
            "  {:<7} matches {:>3}  inliers {:>3}  verified {}",
            c.id,
            c.match_count,
            c.verification.inlier_count(),
            c.verification.verified
        );
    }

    let nothing = query_image(&db, &uniform_noise(200, 200, 2), &QueryConfig::default()).unwrap();
    println!("noise frame: {}", nothing.best);
}
