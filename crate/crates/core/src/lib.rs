//! Recognition pipeline for augmented reality.
//!
//! Fast-Hessian interest points with 64-d Haar descriptors, scanline blob
//! labeling, ratio-test matching, RANSAC homography verification and a
//! JSON object database tying them into a recognize-and-annotate query.

pub mod blobs;
pub mod cli;
pub mod draw;
pub mod features;
pub mod geometry;
pub mod image;
pub mod integral;
pub mod io;
pub mod matching;
pub mod store;
pub mod synth;
