//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use arfex::blobs::{detect_blobs, BinaryMask};
use arfex::features::{
    build_response_maps, extract_features, Descriptor, ExtractionConfig, FeatureSet, LaplacianSign,
    DESCRIPTOR_LEN,
};
use arfex::geometry::{ransac_verify, Homography, Point, RansacConfig};
use arfex::image::{GrayImage, RasterImage};
use arfex::integral::{build_integral, Rect};
use arfex::matching::{distance, match_descriptors, Match, MatchConfig};
use arfex::store::{index_image, query_image, Database, FeatureReport, QueryConfig, UNRECOGNIZED};
use arfex::synth::{add_gaussian_noise, rotation_about_center, uniform_noise, BlobField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.random()).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

// 1. Integral image against naive summation.
fn integral_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let images: Vec<GrayImage> = (0..100).map(|_| random_gray(&mut rng, 64, 64)).collect();
    let start = Instant::now();
    let integrals: Vec<_> = images.iter().map(build_integral).collect();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (img, ii) in images.iter().zip(&integrals) {
        for _ in 0..1000 {
            let (xa, xb) = (rng.random_range(0..64i64), rng.random_range(0..64i64));
            let (ya, yb) = (rng.random_range(0..64i64), rng.random_range(0..64i64));
            let r = Rect::new(xa.min(xb), ya.min(yb), xa.max(xb), ya.max(yb));
            let mut naive = 0.0;
            for y in r.y0..=r.y1 {
                for x in r.x0..=r.x1 {
                    naive += img.value(x as usize, y as usize) as f64 / 255.0;
                }
            }
            worst = worst.max((ii.box_sum(r) - naive).abs());
            checked += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-9 && within(t, 1.0),
        format!(
            "{checked} rectangles, max abs error {worst:.2e}, {:.3} s",
            t.as_secs_f64()
        ),
    )
}

/// Second-derivative box filters evaluated pixel by pixel, with pixels
/// outside the image contributing zero.
fn direct_hessian(img: &GrayImage, x: i64, y: i64, size: i64) -> (f64, f64, f64) {
    let lobe = size / 3;
    let half = (size - 1) / 2;
    let (mut dxx, mut dyy, mut dxy) = (0.0, 0.0, 0.0);
    for v in (y - half)..=(y + half) {
        for u in (x - half)..=(x + half) {
            if u < 0 || v < 0 || u >= img.width() as i64 || v >= img.height() as i64 {
                continue;
            }
            let p = img.value(u as usize, v as usize) as f64 / 255.0;
            let (dx, dy) = (u - x, v - y);
            if dy.abs() < lobe {
                dxx += p * if dx.abs() <= lobe / 2 { -2.0 } else { 1.0 };
            }
            if dx.abs() < lobe {
                dyy += p * if dy.abs() <= lobe / 2 { -2.0 } else { 1.0 };
            }
            if (1..=lobe).contains(&dx.abs()) && (1..=lobe).contains(&dy.abs()) {
                dxy += p * if dx.signum() == dy.signum() {
                    1.0
                } else {
                    -1.0
                };
            }
        }
    }
    let area = (size * size) as f64;
    (dxx / area, dyy / area, dxy / area)
}

// 2. Response maps against direct filtering.
fn response_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = ExtractionConfig::default();
    let mut worst = 0.0f64;
    let mut cells = 0usize;
    let mut sign_mismatch = 0usize;
    for _ in 0..10 {
        let img = random_gray(&mut rng, 64, 64);
        let maps = build_response_maps(&build_integral(&img), &cfg).unwrap();
        for m in &maps {
            for row in 0..m.rows {
                for col in 0..m.cols {
                    let (px, py) = m.pixel_of(col, row);
                    let (dxx, dyy, dxy) =
                        direct_hessian(&img, px as i64, py as i64, m.filter_size as i64);
                    let expected = dxx * dyy - (0.9 * dxy) * (0.9 * dxy);
                    worst = worst.max((m.response(col, row) - expected).abs());
                    // A zero trace is exact in the implementation but may
                    // come out as +-1e-17 here.
                    let trace = dxx + dyy;
                    if trace.abs() > 1e-12 && m.laplacian_sign(col, row) != LaplacianSign::of(trace)
                    {
                        sign_mismatch += 1;
                    }
                    cells += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-9 && sign_mismatch == 0 && within(t, 10.0),
        format!(
            "{cells} cells, max abs error {worst:.2e}, {sign_mismatch} sign mismatches, {:.3} s",
            t.as_secs_f64()
        ),
    )
}

/// Pixel sets of 4-connected components, found by flood fill.
fn flood_fill_components(mask: &BinaryMask) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut comps = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || seen[y * w + x] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![(x, y)];
            seen[y * w + x] = true;
            while let Some((cx, cy)) = stack.pop() {
                comp.push((cx, cy));
                let mut visit = |nx: usize, ny: usize| {
                    if mask.get(nx, ny) && !seen[ny * w + nx] {
                        seen[ny * w + nx] = true;
                        stack.push((nx, ny));
                    }
                };
                if cx > 0 {
                    visit(cx - 1, cy);
                }
                if cx + 1 < w {
                    visit(cx + 1, cy);
                }
                if cy > 0 {
                    visit(cx, cy - 1);
                }
                if cy + 1 < h {
                    visit(cx, cy + 1);
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
    }
    comps.sort();
    comps
}

// 3. Scanline blobs against flood fill.
fn blob_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let masks: Vec<BinaryMask> = (0..500)
        .map(|_| BinaryMask::new(32, 32, (0..32 * 32).map(|_| rng.random_bool(0.4)).collect()))
        .collect();
    let start = Instant::now();
    let labeled: Vec<_> = masks.iter().map(|m| detect_blobs(m, 1)).collect();
    let t = start.elapsed();
    let mut mismatches = 0;
    let mut total = 0;
    for (mask, blobs) in masks.iter().zip(&labeled) {
        let mut ours: Vec<Vec<(usize, usize)>> = blobs
            .iter()
            .map(|b| {
                let mut p: Vec<_> = b.pixels().collect();
                p.sort_unstable();
                p
            })
            .collect();
        ours.sort();
        let oracle = flood_fill_components(mask);
        total += oracle.len();
        if ours != oracle {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && within(t, 1.0),
        format!(
            "500 masks, {total} components, {mismatches} mismatching masks, {:.3} s",
            t.as_secs_f64()
        ),
    )
}

const TEXTURE_SEED: u64 = 4;
const TEXTURE_SIZE: usize = 256;

/// For each point of `a`, the nearest point of `b` under `h`, if within `tol`.
fn counterparts(a: &FeatureSet, b: &FeatureSet, h: &Homography, tol: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, p) in a.points.iter().enumerate() {
        let (x, y) = h.project((p.x, p.y)).unwrap();
        let nearest = b
            .points
            .iter()
            .enumerate()
            .map(|(j, q)| (j, ((q.x - x).powi(2) + (q.y - y).powi(2)).sqrt()))
            .min_by(|u, v| u.1.total_cmp(&v.1));
        if let Some((j, d)) = nearest {
            if d <= tol {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

fn nearest_descriptor(d: &Descriptor, set: &[Descriptor]) -> Option<usize> {
    set.iter()
        .enumerate()
        .map(|(j, t)| (j, distance(d, t)))
        .min_by(|u, v| u.1.total_cmp(&v.1).then(u.0.cmp(&v.0)))
        .map(|(j, _)| j)
}

struct RotationRun {
    points: usize,
    repeated: usize,
    paired: usize,
    artifact: String,
}

fn rotation_run() -> RotationRun {
    let field = BlobField::random(TEXTURE_SIZE, TEXTURE_SIZE, 20, TEXTURE_SEED);
    let h = rotation_about_center(TEXTURE_SIZE, TEXTURE_SIZE, 15f64.to_radians(), 1.0);
    let cfg = ExtractionConfig::default();
    let base = extract_features(&field.render(), &cfg).unwrap();
    let rotated =
        extract_features(&field.render_warped(&h, TEXTURE_SIZE, TEXTURE_SIZE), &cfg).unwrap();
    let pairs = counterparts(&base, &rotated, &h, 2.0);
    let paired = pairs
        .iter()
        .filter(|&&(i, j)| {
            nearest_descriptor(&base.descriptors[i], &rotated.descriptors) == Some(j)
        })
        .count();
    let artifact = format!(
        "{}\n{}\n{:?}\n",
        FeatureReport::new(&cfg, &base).to_json(),
        FeatureReport::new(&cfg, &rotated).to_json(),
        pairs
    );
    RotationRun {
        points: base.len(),
        repeated: pairs.len(),
        paired,
        artifact,
    }
}

// 4. Rotation repeatability and descriptor pairing.
fn rotation_repeatability() -> Outcome {
    let start = Instant::now();
    let r = rotation_run();
    let t = start.elapsed();
    let repeat = r.repeated as f64 / r.points.max(1) as f64;
    let paired = r.paired as f64 / r.repeated.max(1) as f64;
    outcome(
        r.points > 0 && repeat >= 0.6 && paired >= 0.8 && within(t, 5.0),
        format!(
            "{} points, repeated {}/{} ({:.1}%), NN-paired {}/{} ({:.1}%), {:.3} s",
            r.points,
            r.repeated,
            r.points,
            100.0 * repeat,
            r.paired,
            r.repeated,
            100.0 * paired,
            t.as_secs_f64()
        ),
    )
}

// 5. Descriptor invariance to gain and offset.
fn photometric_invariance() -> Outcome {
    let field = BlobField::random(TEXTURE_SIZE, TEXTURE_SIZE, 20, TEXTURE_SEED);
    let gray = field.render_gray();
    let cfg = ExtractionConfig::default();
    let base = extract_features(&RasterImage::from_gray(&gray), &cfg).unwrap();
    let bright =
        extract_features(&RasterImage::from_gray(&gray.map_affine(1.3, 10.0)), &cfg).unwrap();
    let pairs = counterparts(&base, &bright, &Homography::identity(), 2.0);
    let close = pairs
        .iter()
        .filter(|&&(i, j)| distance(&base.descriptors[i], &bright.descriptors[j]) < 0.1)
        .count();
    let frac = close as f64 / pairs.len().max(1) as f64;
    outcome(
        !pairs.is_empty() && frac >= 0.9,
        format!(
            "{} repeated of {} points, {close} with distance < 0.1 ({:.1}%)",
            pairs.len(),
            base.len(),
            100.0 * frac
        ),
    )
}

fn random_descriptor(rng: &mut ChaCha8Rng) -> Descriptor {
    let v: Vec<f64> = (0..DESCRIPTOR_LEN)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let sign = if rng.random() {
        LaplacianSign::Positive
    } else {
        LaplacianSign::Negative
    };
    Descriptor::normalized(v.try_into().unwrap(), sign)
}

fn perturbed(d: &Descriptor, rng: &mut ChaCha8Rng, amount: f64) -> Descriptor {
    let v: Vec<f64> = d
        .components
        .iter()
        .map(|c| c + rng.random_range(-amount..amount))
        .collect();
    Descriptor::normalized(v.try_into().unwrap(), d.laplacian_sign)
}

/// Sort every candidate distance, then apply the ratio test to the two
/// smallest.
fn oracle_matches(query: &[Descriptor], target: &[Descriptor], cfg: &MatchConfig) -> Vec<Match> {
    let mut out = Vec::new();
    for (qi, q) in query.iter().enumerate() {
        let mut cands: Vec<(f64, usize)> = target
            .iter()
            .enumerate()
            .filter(|(_, t)| !cfg.use_sign_filter || t.laplacian_sign == q.laplacian_sign)
            .map(|(ti, t)| {
                let d2: f64 = q
                    .components
                    .iter()
                    .zip(&t.components)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2.sqrt(), ti)
            })
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let keep = match cands.as_slice() {
            [] => false,
            [(d1, _)] => *d1 < 0.5,
            [(d1, _), (d2, _), ..] => *d1 < cfg.ratio_threshold * d2,
        };
        if keep {
            out.push(Match {
                query_index: qi,
                target_index: cands[0].1,
                distance: cands[0].0,
            });
        }
    }
    out.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.query_index.cmp(&b.query_index))
            .then(a.target_index.cmp(&b.target_index))
    });
    out
}

// 6. Matcher against brute force.
fn matcher_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut identical = 0;
    let mut matched = 0;
    let trials = [(true, 0.7), (false, 0.7), (true, 0.9), (false, 1.0)];
    for &(sign_filter, ratio) in &trials {
        let query: Vec<Descriptor> = (0..200).map(|_| random_descriptor(&mut rng)).collect();
        // Half the targets are noisy copies of queries so that the ratio
        // test has real matches to accept.
        let mut target: Vec<Descriptor> = (0..100)
            .map(|i| perturbed(&query[2 * i], &mut rng, 0.05))
            .collect();
        target.extend((0..100).map(|_| random_descriptor(&mut rng)));
        let cfg = MatchConfig {
            ratio_threshold: ratio,
            use_sign_filter: sign_filter,
        };
        let ours = serde_json::to_string(&match_descriptors(&query, &target, &cfg)).unwrap();
        let expected = oracle_matches(&query, &target, &cfg);
        matched += expected.len();
        if ours == serde_json::to_string(&expected).unwrap() {
            identical += 1;
        }
    }
    outcome(
        identical == trials.len() && matched > 0,
        format!(
            "{identical}/{} configurations byte-identical, {matched} matches total",
            trials.len()
        ),
    )
}

// 7. RANSAC recovery under outliers.
fn ransac_recovery() -> Outcome {
    let start = Instant::now();
    let mut ok = 0;
    let mut worst_error = 0.0f64;
    let mut fewest = usize::MAX;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let similarity = Homography::similarity(
            rng.random_range(-PI..PI),
            rng.random_range(0.7..1.4),
            (128.0, 128.0),
            (
                rng.random_range(100.0..156.0),
                rng.random_range(100.0..156.0),
            ),
        );
        let mut m = *similarity.matrix();
        m[(2, 0)] = rng.random_range(-4e-4..4e-4);
        m[(2, 1)] = rng.random_range(-4e-4..4e-4);
        let truth = Homography::from_matrix(m).unwrap();
        let noise = Normal::new(0.0, 0.5).unwrap();
        let mut src: Vec<Point> = Vec::new();
        let mut dst: Vec<Point> = Vec::new();
        for _ in 0..30 {
            let p = (rng.random_range(0.0..256.0), rng.random_range(0.0..256.0));
            let q = truth.project(p).unwrap();
            src.push(p);
            dst.push((q.0 + noise.sample(&mut rng), q.1 + noise.sample(&mut rng)));
        }
        for _ in 0..20 {
            src.push((rng.random_range(0.0..256.0), rng.random_range(0.0..256.0)));
            dst.push((rng.random_range(0.0..256.0), rng.random_range(0.0..256.0)));
        }
        let cfg = RansacConfig {
            seed,
            ..Default::default()
        };
        let r = ransac_verify(&src, &dst, &cfg).unwrap();
        let true_inliers = r.inlier_indices.iter().filter(|&&i| i < 30).count();
        fewest = fewest.min(true_inliers);
        worst_error = worst_error.max(r.mean_reprojection_error);
        if r.verified && true_inliers >= 28 && r.mean_reprojection_error < 1.0 {
            ok += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        ok >= 19 && within(t, 2.0),
        format!(
            "{ok}/20 seeds recovered, fewest true inliers {fewest}, worst mean error {worst_error:.3} px, {:.3} s",
            t.as_secs_f64()
        ),
    )
}

struct RecognitionRun {
    correct: usize,
    noise_unrecognized: bool,
    artifact: String,
}

fn recognition_run() -> RecognitionRun {
    let size = TEXTURE_SIZE;
    let mut db = Database::default();
    let fields: Vec<BlobField> = (0..5)
        .map(|i| BlobField::random(size, size, 60, 800 + i))
        .collect();
    for (i, f) in fields.iter().enumerate() {
        db = index_image(
            &db,
            &f.render(),
            &format!("object-{i}"),
            &format!("Object {i}"),
            "synthetic",
        )
        .unwrap();
    }
    let warp = rotation_about_center(size, size, 15f64.to_radians(), 0.8);
    let cfg = QueryConfig::default();
    let mut correct = 0;
    let mut artifact = db.to_json();
    for (i, f) in fields.iter().enumerate() {
        let query = add_gaussian_noise(&f.render_warped(&warp, size, size), 5.0, 900 + i as u64);
        let res = query_image(&db, &query, &cfg).unwrap();
        if res.best == format!("object-{i}") && res.ranked[0].verification.verified {
            correct += 1;
        }
        artifact.push_str(&res.to_json());
    }
    let res = query_image(&db, &uniform_noise(size, size, 999), &cfg).unwrap();
    artifact.push_str(&res.to_json());
    RecognitionRun {
        correct,
        noise_unrecognized: res.best == UNRECOGNIZED,
        artifact,
    }
}

// 8. End-to-end recognition.
fn end_to_end() -> Outcome {
    let start = Instant::now();
    let r = recognition_run();
    let t = start.elapsed();
    outcome(
        r.correct == 5 && r.noise_unrecognized && within(t, 30.0),
        format!(
            "top-1 {}/5 verified, noise query {}, {:.3} s",
            r.correct,
            if r.noise_unrecognized {
                "unrecognized"
            } else {
                "RECOGNIZED"
            },
            t.as_secs_f64()
        ),
    )
}

// 9. Reruns produce identical artifacts.
fn determinism() -> Outcome {
    let a = (rotation_run().artifact, recognition_run().artifact);
    let b = (rotation_run().artifact, recognition_run().artifact);
    outcome(
        a == b,
        format!(
            "rotation artifact {} bytes {}, recognition artifact {} bytes {}",
            a.0.len(),
            if a.0 == b.0 { "identical" } else { "DIFFERS" },
            a.1.len(),
            if a.1 == b.1 { "identical" } else { "DIFFERS" }
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("integral image exactness", integral_exactness),
        ("response map oracle equivalence", response_oracle),
        ("blob / flood-fill equivalence", blob_partition),
        ("rotation repeatability", rotation_repeatability),
        ("photometric invariance", photometric_invariance),
        ("matcher oracle equivalence", matcher_oracle),
        ("RANSAC recovery", ransac_recovery),
        ("end-to-end recognition", end_to_end),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!(
            "{} {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
