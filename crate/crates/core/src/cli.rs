//! The `arfex` command line.
//!
//! Every command writes its JSON result to `--output` and diagnostics to
//! standard error. Exit codes: 0 success or recognized, 1 unrecognized,
//! 2 I/O or usage, 3 unusable image, 4 database constraint.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::blobs::{blob_report, BlobConfig, Polarity};
use crate::draw::{keypoint_overlay, recognition_overlay};
use crate::features::{extract_features, ExtractionConfig, FeatureError};
use crate::geometry::Point;
use crate::image::RasterImage;
use crate::io::{read_image, write_ppm, ImageIoError};
use crate::matching::MatchConfig;
use crate::store::{
    index_image, load_db, query_image, save_db, Database, FeatureReport, QueryConfig, QueryResult,
    StoreError,
};

#[derive(Debug, Parser)]
#[command(
    name = "arfex",
    version,
    about = "Feature extraction, blob detection and object recognition for AR"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect interest points and compute descriptors.
    Extract(ExtractArgs),
    /// Threshold an image and label its connected blobs.
    Blobs(BlobsArgs),
    /// Add an image to an object database, creating it if needed.
    Index(IndexArgs),
    /// Recognize the object shown in an image.
    Query(QueryArgs),
    /// Draw a feature or query JSON result over its image.
    Annotate(AnnotateArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Write a PPM copy of the input with keypoints drawn on it.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Hessian response threshold.
    #[arg(long, value_parser = non_negative)]
    pub threshold: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub octaves: Option<u8>,
    /// Skip orientation assignment.
    #[arg(long)]
    pub upright: bool,
}

#[derive(Debug, Args)]
pub struct BlobsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Gray level (0-255) separating foreground from background.
    #[arg(long, default_value_t = 128)]
    pub threshold: u8,
    #[arg(long, default_value = "white")]
    pub polarity: Polarity,
    #[arg(long, default_value_t = 1)]
    pub min_pixels: usize,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub id: String,
    #[arg(long)]
    pub name: String,
    /// Free text, or `@path` to read it from a file.
    #[arg(long)]
    pub info: String,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Write a PPM copy of the input with inliers and the object frame.
    #[arg(long)]
    pub annotate: Option<PathBuf>,
    #[arg(long, env = "ARFEX_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Nearest-neighbor ratio test threshold, in (0, 1].
    #[arg(long, value_parser = ratio)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// JSON written by `extract` or `query`.
    #[arg(long)]
    pub result: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a finite number >= 0, got {s:?}")),
    }
}

fn ratio(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        _ => Err(format!("expected a number in (0, 1], got {s:?}")),
    }
}

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn io(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ImageIoError> for CliError {
    fn from(e: ImageIoError) -> Self {
        Self::io(e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        Self {
            code: 3,
            message: e.to_string(),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        let code = match e {
            StoreError::Io(_) | StoreError::Parse(_) | StoreError::VersionMismatch { .. } => 2,
            StoreError::NoFeatures | StoreError::Feature(_) => 3,
            StoreError::DuplicateId(_) => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn load_image(path: &Path) -> Result<RasterImage, CliError> {
    read_image(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, format!("{text}\n"))
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    write_text(path, &text)
}

fn write_overlay(path: &Path, img: &RasterImage) -> Result<(), CliError> {
    write_ppm(path, img).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn extract(args: &ExtractArgs) -> Result<u8, CliError> {
    let img = load_image(&args.input)?;
    let mut cfg = ExtractionConfig {
        upright: args.upright,
        ..Default::default()
    };
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    if let Some(o) = args.octaves {
        cfg.octaves = o.into();
    }
    let features = extract_features(&img, &cfg)?;
    write_text(&args.output, &FeatureReport::new(&cfg, &features).to_json())?;
    if let Some(path) = &args.overlay {
        write_overlay(path, &keypoint_overlay(&img, &features.points))?;
    }
    eprintln!("{} interest points", features.len());
    Ok(0)
}

pub fn blobs(args: &BlobsArgs) -> Result<u8, CliError> {
    let img = load_image(&args.input)?;
    let cfg = BlobConfig {
        threshold: args.threshold,
        polarity: args.polarity,
        min_pixels: args.min_pixels,
    };
    let report = blob_report(&img.to_grayscale(), &cfg);
    write_json(&args.output, &report)?;
    eprintln!("{} blobs", report.blobs.len());
    Ok(0)
}

pub fn index(args: &IndexArgs) -> Result<u8, CliError> {
    let info = match args.info.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::io(format!("{path}: {e}")))?,
        None => args.info.clone(),
    };
    let db = if args.db.exists() {
        load_db(&args.db)?
    } else {
        Database::default()
    };
    let img = load_image(&args.input)?;
    let db = index_image(&db, &img, &args.id, &args.name, &info)?;
    save_db(&db, &args.db)?;
    let record = db.get(&args.id).expect("just indexed");
    eprintln!(
        "indexed {:?} with {} features ({} objects)",
        args.id,
        record.keypoints.len(),
        db.records.len()
    );
    Ok(0)
}

pub fn query(args: &QueryArgs) -> Result<u8, CliError> {
    let db = load_db(&args.db)?;
    let img = load_image(&args.input)?;
    let mut cfg = QueryConfig::default();
    cfg.ransac.seed = args.seed;
    if let Some(r) = args.ratio {
        cfg.matching = MatchConfig {
            ratio_threshold: r,
            ..cfg.matching
        };
    }
    let result = query_image(&db, &img, &cfg)?;
    write_text(&args.output, &result.to_json())?;
    if let Some(path) = &args.annotate {
        write_overlay(
            path,
            &recognition_overlay(&img, &result.inlier_points, result.frame.as_ref()),
        )?;
    }
    if result.is_recognized() {
        let inliers = result.ranked[0].verification.inlier_count();
        eprintln!("recognized {:?} ({inliers} inliers)", result.best);
        Ok(0)
    } else {
        eprintln!("unrecognized");
        Ok(1)
    }
}

pub fn annotate(args: &AnnotateArgs) -> Result<u8, CliError> {
    let img = load_image(&args.input)?;
    let text = fs::read_to_string(&args.result)
        .map_err(|e| CliError::io(format!("{}: {e}", args.result.display())))?;
    let bad = |e: serde_json::Error| CliError::io(format!("{}: {e}", args.result.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    let out = if value.get("points").is_some() {
        let report: FeatureReport = serde_json::from_value(value).map_err(bad)?;
        keypoint_overlay(&img, &report.points)
    } else {
        let result: QueryResult = serde_json::from_value(value).map_err(bad)?;
        let inliers: &[Point] = &result.inlier_points;
        recognition_overlay(&img, inliers, result.frame.as_ref())
    };
    write_overlay(&args.output, &out)?;
    Ok(0)
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Extract(a) => extract(a),
        Command::Blobs(a) => blobs(a),
        Command::Index(a) => index(a),
        Command::Query(a) => query(a),
        Command::Annotate(a) => annotate(a),
    }
}

/// Parses the process arguments, runs the command and reports errors.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
