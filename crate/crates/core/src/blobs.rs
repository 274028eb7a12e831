//! Scanline blob detection.
//!
//! Each row of a binary mask is split into maximal foreground runs
//! (line blobs). Runs on adjacent rows that share at least one column are
//! merged with a union-find, which yields exactly the 4-connected
//! components of the mask.

use serde::{Deserialize, Serialize};

use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Foreground is `value >= threshold`.
    White,
    /// Foreground is `value < threshold`.
    Black,
}

impl std::str::FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "white" => Ok(Self::White),
            "black" => Ok(Self::Black),
            other => Err(format!(
                "polarity must be `white` or `black`, got `{other}`"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// # Panics
    /// If `bits.len() != width * height`.
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask size mismatch");
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[bool] {
        &self.bits[y * self.width..(y + 1) * self.width]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

pub fn binarize(gray: &GrayImage, threshold: u8, polarity: Polarity) -> BinaryMask {
    let bits = gray
        .values()
        .iter()
        .map(|&v| match polarity {
            Polarity::White => v >= threshold,
            Polarity::Black => v < threshold,
        })
        .collect();
    BinaryMask::new(gray.width(), gray.height(), bits)
}

/// A maximal horizontal run of foreground pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineBlob {
    pub row: usize,
    pub x_start: usize,
    pub x_end: usize,
    pub label: usize,
}

impl LineBlob {
    pub fn len(&self) -> usize {
        self.x_end - self.x_start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn overlaps(&self, other: &LineBlob) -> bool {
        self.x_start <= other.x_end && other.x_start <= self.x_end
    }
}

/// Finds the runs of one mask row, labelling them `first_label`,
/// `first_label + 1`, and so on.
pub fn detect_lineblobs(row: &[bool], row_index: usize, first_label: usize) -> Vec<LineBlob> {
    let mut runs = Vec::new();
    let mut x = 0;
    while x < row.len() {
        if !row[x] {
            x += 1;
            continue;
        }
        let start = x;
        while x < row.len() && row[x] {
            x += 1;
        }
        runs.push(LineBlob {
            row: row_index,
            x_start: start,
            x_end: x - 1,
            label: first_label + runs.len(),
        });
    }
    runs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Blob {
    #[serde(rename = "count")]
    pub pixel_count: usize,
    /// `(x_min, y_min, x_max, y_max)`, inclusive.
    pub bbox: [usize; 4],
    pub centroid: [f64; 2],
    #[serde(skip)]
    pub member_runs: Vec<LineBlob>,
}

impl Blob {
    fn from_runs(mut runs: Vec<LineBlob>) -> Self {
        runs.sort_by_key(|r| (r.row, r.x_start));
        let mut bbox = [usize::MAX, usize::MAX, 0, 0];
        let (mut count, mut sx, mut sy) = (0usize, 0.0, 0.0);
        for r in &runs {
            let n = r.len();
            bbox[0] = bbox[0].min(r.x_start);
            bbox[1] = bbox[1].min(r.row);
            bbox[2] = bbox[2].max(r.x_end);
            bbox[3] = bbox[3].max(r.row);
            count += n;
            // Sum of x_start..=x_end.
            sx += (r.x_start + r.x_end) as f64 * n as f64 / 2.0;
            sy += (r.row * n) as f64;
        }
        Self {
            pixel_count: count,
            bbox,
            centroid: [sx / count as f64, sy / count as f64],
            member_runs: runs,
        }
    }

    /// All pixel coordinates of the blob, row-major.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.member_runs
            .iter()
            .flat_map(|r| (r.x_start..=r.x_end).map(move |x| (x, r.row)))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so the result does not depend on call order.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Merges runs that overlap on adjacent rows into blobs.
///
/// Runs may arrive in any row order. Blobs with fewer than `min_pixels`
/// pixels are dropped. The result is sorted by descending size, then by
/// `(y_min, x_min)`.
pub fn merge_lineblobs(runs: &[LineBlob], min_pixels: usize) -> Vec<Blob> {
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by_key(|&i| (runs[i].row, runs[i].x_start));

    let mut uf = UnionFind::new(runs.len());
    // Two-pointer sweep over consecutive rows, both sorted by x_start.
    let mut row_start = 0;
    let mut prev: &[usize] = &[];
    while row_start < order.len() {
        let row = runs[order[row_start]].row;
        let mut row_end = row_start;
        while row_end < order.len() && runs[order[row_end]].row == row {
            row_end += 1;
        }
        let current = &order[row_start..row_end];
        if prev.first().is_some_and(|&p| runs[p].row + 1 == row) {
            let mut j = 0;
            for &c in current {
                while j < prev.len() && runs[prev[j]].x_end < runs[c].x_start {
                    j += 1;
                }
                let mut k = j;
                while k < prev.len() && runs[prev[k]].x_start <= runs[c].x_end {
                    if runs[prev[k]].overlaps(&runs[c]) {
                        uf.union(prev[k], c);
                    }
                    k += 1;
                }
            }
        }
        prev = current;
        row_start = row_end;
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<LineBlob>> = Default::default();
    for (i, run) in runs.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(*run);
    }
    let mut blobs: Vec<Blob> = groups
        .into_values()
        .map(Blob::from_runs)
        .filter(|b| b.pixel_count >= min_pixels)
        .collect();
    blobs.sort_by(|a, b| {
        b.pixel_count
            .cmp(&a.pixel_count)
            .then(a.bbox[1].cmp(&b.bbox[1]))
            .then(a.bbox[0].cmp(&b.bbox[0]))
    });
    blobs
}

/// Collects the runs of every row, top to bottom.
pub fn mask_lineblobs(mask: &BinaryMask) -> Vec<LineBlob> {
    let mut runs = Vec::new();
    for y in 0..mask.height() {
        let row = detect_lineblobs(mask.row(y), y, runs.len());
        runs.extend(row);
    }
    runs
}

pub fn detect_blobs(mask: &BinaryMask, min_pixels: usize) -> Vec<Blob> {
    merge_lineblobs(&mask_lineblobs(mask), min_pixels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlobConfig {
    pub threshold: u8,
    pub polarity: Polarity,
    pub min_pixels: usize,
}

impl Default for BlobConfig {
    fn default() -> Self {
        Self {
            threshold: 128,
            polarity: Polarity::White,
            min_pixels: 1,
        }
    }
}

/// The blob report written by the command-line tool.
#[derive(Debug, Clone, Serialize)]
pub struct BlobReport {
    pub threshold: u8,
    pub polarity: Polarity,
    pub blobs: Vec<Blob>,
}

pub fn blob_report(gray: &GrayImage, cfg: &BlobConfig) -> BlobReport {
    let mask = binarize(gray, cfg.threshold, cfg.polarity);
    BlobReport {
        threshold: cfg.threshold,
        polarity: cfg.polarity,
        blobs: detect_blobs(&mask, cfg.min_pixels),
    }
}
