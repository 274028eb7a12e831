//! Robust homography estimation from contaminated correspondences.
//!
//! cargo run --example homography_ransac

use arfex::geometry::{
    estimate_homography, ransac_verify, Homography, ModelKind, Point, RansacConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut m = *Homography::similarity(0.3, 1.1, (100.0, 100.0), (120.0, 90.0)).matrix();
    m[(2, 0)] = 2e-4;
    let truth = Homography::from_matrix(m).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut src: Vec<Point> = Vec::new();
    let mut dst: Vec<Point> = Vec::new();
    for i in 0..60 {
        let p = (rng.random_range(0.0..200.0), rng.random_range(0.0..200.0));
        let q = if i % 3 == 0 {
            (rng.random_range(0.0..200.0), rng.random_range(0.0..200.0))
        } else {
            let q = truth.project(p).unwrap();
            (
                q.0 + rng.random_range(-0.5..0.5),
                q.1 + rng.random_range(-0.5..0.5),
            )
        };
        src.push(p);
        dst.push(q);
    }

    let naive = estimate_homography(&src, &dst).unwrap();
    println!(
        "least squares on everything maps (50, 50) to {:?}",
        naive.project((50.0, 50.0)).unwrap()
    );
    println!(
        "truth maps (50, 50) to                      {:?}",
        truth.project((50.0, 50.0)).unwrap()
    );

    for model in [ModelKind::Homography, ModelKind::Similarity] {
        let cfg = RansacConfig {
            model,
            seed: 7,
            ..Default::default()
        };
        let r = ransac_verify(&src, &dst, &cfg).unwrap();
        println!(
            "{model:?}: verified {}, {} inliers (need {}), mean error {:.3} px",
            r.verified,
            r.inlier_count(),
            cfg.required_inliers(src.len()),
            r.mean_reprojection_error
        );
        if let Some(h) = r.model {
            println!("  maps (50, 50) to {:?}", h.project((50.0, 50.0)).unwrap());
        }
    }
}
