//! Run-length-encoded binary masks and the set/geometry operations built on them.
//!
//! Masks are stored as COCO-style alternating run counts in row-major order:
//! the first run is background, runs sum to `height * width`, and no interior
//! run has length zero. All set operations walk the run streams directly
//! without decoding to a dense grid.
//!
//! Coordinate convention used across the crate: `x` is the column axis, `y`
//! the row axis, and pixel `(r, c)` has its center at `(c + 0.5, r + 0.5)`.

mod raster;

pub use raster::{BBox, Polygon, Rasterization};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("mask must have nonzero area, got {height}x{width}")]
    ZeroArea { height: u32, width: u32 },
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("pixel buffer length {actual} does not match {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("run lengths sum to {actual}, expected {expected}")]
    RunSumMismatch { expected: u64, actual: u64 },
    #[error("operation requires a non-empty mask")]
    EmptyMask,
    #[error("IoU is undefined when both masks are empty")]
    BothEmpty,
    #[error("label {value} at index {index} is outside {{0, 1, 2}}")]
    LabelOutOfRange { index: usize, value: u8 },
    #[error("visible and occluded masks overlap in {pixels} pixel(s)")]
    MasksOverlap { pixels: u64 },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {index} is not finite")]
    NonFiniteVertex { index: usize },
    #[error("invalid box: ({x_min}, {y_min}, {x_max}, {y_max})")]
    InvalidBBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
}

/// A 2D binary mask in canonical run-length encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    height: u32,
    width: u32,
    runs: Vec<u32>,
}

impl BinaryMask {
    /// Encodes a dense row-major pixel grid.
    pub fn from_pixels(height: u32, width: u32, pixels: &[bool]) -> Result<Self, MaskError> {
        let n = checked_len(height, width)?;
        if pixels.len() != n {
            return Err(MaskError::LengthMismatch {
                expected: n,
                actual: pixels.len(),
            });
        }
        let mut runs = Vec::new();
        let mut value = false;
        let mut count: u32 = 0;
        for &p in pixels {
            if p != value {
                runs.push(count);
                value = p;
                count = 0;
            }
            count += 1;
        }
        runs.push(count);
        Ok(Self {
            height,
            width,
            runs,
        })
    }

    /// Builds a mask from raw run counts, canonicalizing zero-length and
    /// repeated-polarity runs. The first count is background.
    pub fn from_runs(height: u32, width: u32, raw: Vec<u32>) -> Result<Self, MaskError> {
        let n = checked_len(height, width)? as u64;
        let total: u64 = raw.iter().map(|&c| c as u64).sum();
        if total != n {
            return Err(MaskError::RunSumMismatch {
                expected: n,
                actual: total,
            });
        }
        let pairs = raw
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i % 2 == 1, c as u64));
        Ok(Self::from_run_pairs(height, width, pairs))
    }

    /// All-background mask.
    pub fn empty(height: u32, width: u32) -> Result<Self, MaskError> {
        let n = checked_len(height, width)?;
        Ok(Self {
            height,
            width,
            runs: vec![n as u32],
        })
    }

    /// All-foreground mask.
    pub fn full(height: u32, width: u32) -> Result<Self, MaskError> {
        let n = checked_len(height, width)?;
        Ok(Self {
            height,
            width,
            runs: vec![0, n as u32],
        })
    }

    /// Canonical encoder shared by the constructors and the run-stream ops.
    /// `pairs` yields (value, length) segments in row-major order; lengths
    /// must sum to `height * width`.
    fn from_run_pairs(height: u32, width: u32, pairs: impl Iterator<Item = (bool, u64)>) -> Self {
        let mut runs: Vec<u32> = Vec::new();
        let mut value = false;
        for (v, c) in pairs {
            if c == 0 {
                continue;
            }
            let c = c as u32;
            if runs.is_empty() {
                if v {
                    runs.push(0);
                }
                runs.push(c);
            } else if v == value {
                *runs.last_mut().unwrap() += c;
            } else {
                runs.push(c);
            }
            value = v;
        }
        if runs.is_empty() {
            runs.push(0);
        }
        Self {
            height,
            width,
            runs,
        }
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Alternating run counts, background first.
    pub fn runs(&self) -> &[u32] {
        &self.runs
    }

    /// Decodes to a dense row-major grid.
    pub fn to_pixels(&self) -> Vec<bool> {
        let n = self.height as usize * self.width as usize;
        let mut pixels = vec![false; n];
        let mut idx = 0usize;
        for (i, &c) in self.runs.iter().enumerate() {
            let end = idx + c as usize;
            if i % 2 == 1 {
                pixels[idx..end].fill(true);
            }
            idx = end;
        }
        pixels
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> u64 {
        self.runs
            .iter()
            .skip(1)
            .step_by(2)
            .map(|&c| c as u64)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    fn check_dims(&self, other: &Self) -> Result<(), MaskError> {
        if self.height != other.height || self.width != other.width {
            return Err(MaskError::DimensionMismatch(
                self.height,
                self.width,
                other.height,
                other.width,
            ));
        }
        Ok(())
    }

    /// Pixelwise AND.
    pub fn intersect(&self, other: &Self) -> Result<Self, MaskError> {
        self.check_dims(other)?;
        Ok(self.merge_with(other, |a, b| a && b))
    }

    /// Pixelwise OR.
    pub fn union(&self, other: &Self) -> Result<Self, MaskError> {
        self.check_dims(other)?;
        Ok(self.merge_with(other, |a, b| a || b))
    }

    /// Pixelwise AND-NOT (`self` minus `other`).
    pub fn subtract(&self, other: &Self) -> Result<Self, MaskError> {
        self.check_dims(other)?;
        Ok(self.merge_with(other, |a, b| a && !b))
    }

    /// Walks both run streams in lockstep, emitting ops on aligned segments.
    fn merge_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let pairs = RunZip::new(&self.runs, &other.runs).map(|(va, vb, step)| (op(va, vb), step));
        Self::from_run_pairs(self.height, self.width, pairs)
    }

    /// Foreground overlap in pixels, computed without allocating.
    pub fn intersection_area(&self, other: &Self) -> Result<u64, MaskError> {
        self.check_dims(other)?;
        Ok(RunZip::new(&self.runs, &other.runs)
            .filter(|&(va, vb, _)| va && vb)
            .map(|(_, _, step)| step)
            .sum())
    }

    /// Intersection over union. Errors when both masks are empty; the caller
    /// decides the policy for that case.
    pub fn iou(&self, other: &Self) -> Result<f64, MaskError> {
        let inter = self.intersection_area(other)?;
        let union = self.area() + other.area() - inter;
        if union == 0 {
            return Err(MaskError::BothEmpty);
        }
        Ok(inter as f64 / union as f64)
    }

    /// Mean of foreground pixel-center coordinates, returned as `(x, y)`.
    pub fn centroid(&self) -> Result<(f64, f64), MaskError> {
        let area = self.area();
        if area == 0 {
            return Err(MaskError::EmptyMask);
        }
        let w = self.width as u64;
        let mut sum_r: u64 = 0;
        let mut sum_c: u64 = 0;
        self.for_each_foreground_segment(|row, c0, len| {
            sum_r += row as u64 * len;
            // columns c0..c0+len contribute an arithmetic series
            sum_c += len * (2 * c0 as u64 + len - 1) / 2;
            debug_assert!(c0 as u64 + len <= w);
        });
        let cx = sum_c as f64 / area as f64 + 0.5;
        let cy = sum_r as f64 / area as f64 + 0.5;
        Ok((cx, cy))
    }

    /// A foreground pixel `(row, col)` suitable as a grasp/suction target:
    /// the pixel containing the centroid when that pixel is foreground,
    /// otherwise the foreground pixel nearest to the centroid (ties broken
    /// in row-major order).
    pub fn safe_point(&self) -> Result<(u32, u32), MaskError> {
        let (cx, cy) = self.centroid()?;
        let cr = cy.floor() as i64;
        let cc = cx.floor() as i64;
        if cr >= 0
            && cc >= 0
            && (cr as u32) < self.height
            && (cc as u32) < self.width
            && self.contains(cr as u32, cc as u32)
        {
            return Ok((cr as u32, cc as u32));
        }
        let mut best: Option<(f64, u32, u32)> = None;
        self.for_each_foreground_segment(|row, c0, len| {
            let py = row as f64 + 0.5;
            for c in c0..c0 + len as u32 {
                let px = c as f64 + 0.5;
                let d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
                if best.map_or(true, |(bd, _, _)| d2 < bd) {
                    best = Some((d2, row, c));
                }
            }
        });
        let (_, r, c) = best.expect("non-empty mask has a foreground pixel");
        Ok((r, c))
    }

    /// True if pixel `(row, col)` is foreground.
    pub fn contains(&self, row: u32, col: u32) -> bool {
        if row >= self.height || col >= self.width {
            return false;
        }
        let target = row as u64 * self.width as u64 + col as u64;
        let mut idx: u64 = 0;
        for (i, &c) in self.runs.iter().enumerate() {
            idx += c as u64;
            if target < idx {
                return i % 2 == 1;
            }
        }
        false
    }

    /// Calls `f(row, start_col, len)` for each maximal within-row foreground
    /// segment, in row-major order.
    fn for_each_foreground_segment(&self, mut f: impl FnMut(u32, u32, u64)) {
        let w = self.width as u64;
        let mut idx: u64 = 0;
        for (i, &c) in self.runs.iter().enumerate() {
            let mut len = c as u64;
            if i % 2 == 1 {
                let mut pos = idx;
                while len > 0 {
                    let row = pos / w;
                    let col = pos % w;
                    let take = len.min(w - col);
                    f(row as u32, col as u32, take);
                    pos += take;
                    len -= take;
                }
            }
            idx += c as u64;
        }
    }
}

fn checked_len(height: u32, width: u32) -> Result<usize, MaskError> {
    let n = height as usize * width as usize;
    if n == 0 {
        return Err(MaskError::ZeroArea { height, width });
    }
    Ok(n)
}

/// Lockstep iterator over two run streams of equal total length, yielding
/// `(value_a, value_b, segment_len)` for maximal aligned segments.
struct RunZip<'a> {
    a: &'a [u32],
    b: &'a [u32],
    ai: usize,
    bi: usize,
    rem_a: u64,
    rem_b: u64,
}

impl<'a> RunZip<'a> {
    fn new(a: &'a [u32], b: &'a [u32]) -> Self {
        Self {
            a,
            b,
            ai: 0,
            bi: 0,
            rem_a: 0,
            rem_b: 0,
        }
    }
}

impl Iterator for RunZip<'_> {
    type Item = (bool, bool, u64);

    fn next(&mut self) -> Option<Self::Item> {
        while self.rem_a == 0 && self.ai < self.a.len() {
            self.rem_a = self.a[self.ai] as u64;
            self.ai += 1;
        }
        while self.rem_b == 0 && self.bi < self.b.len() {
            self.rem_b = self.b[self.bi] as u64;
            self.bi += 1;
        }
        if self.rem_a == 0 || self.rem_b == 0 {
            return None;
        }
        // value of the run currently being consumed: odd run index = foreground
        let va = self.ai % 2 == 0;
        let vb = self.bi % 2 == 0;
        let step = self.rem_a.min(self.rem_b);
        self.rem_a -= step;
        self.rem_b -= step;
        Some((va, vb, step))
    }
}

/// Wire format: `{"size": [height, width], "counts": [..]}`.
#[derive(Serialize, Deserialize)]
struct RleRepr {
    size: [u32; 2],
    counts: Vec<u32>,
}

impl Serialize for BinaryMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RleRepr {
            size: [self.height, self.width],
            counts: self.runs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RleRepr::deserialize(deserializer)?;
        BinaryMask::from_runs(repr.size[0], repr.size[1], repr.counts)
            .map_err(serde::de::Error::custom)
    }
}

/// Per-pixel instance labeling: background 0, visible 1, occluded 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiClassMask {
    height: u32,
    width: u32,
    labels: Vec<u8>,
}

pub const LABEL_BACKGROUND: u8 = 0;
pub const LABEL_VISIBLE: u8 = 1;
pub const LABEL_OCCLUDED: u8 = 2;

impl MultiClassMask {
    pub fn new(height: u32, width: u32, labels: Vec<u8>) -> Result<Self, MaskError> {
        let n = checked_len(height, width)?;
        if labels.len() != n {
            return Err(MaskError::LengthMismatch {
                expected: n,
                actual: labels.len(),
            });
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &v)| v > LABEL_OCCLUDED)
        {
            return Err(MaskError::LabelOutOfRange { index, value });
        }
        Ok(Self {
            height,
            width,
            labels,
        })
    }

    /// Combines disjoint visible and occluded masks into one label field.
    pub fn from_masks(visible: &BinaryMask, occluded: &BinaryMask) -> Result<Self, MaskError> {
        visible.check_dims(occluded)?;
        let overlap = visible.intersection_area(occluded)?;
        if overlap > 0 {
            return Err(MaskError::MasksOverlap { pixels: overlap });
        }
        let mut labels = vec![LABEL_BACKGROUND; visible.height as usize * visible.width as usize];
        for (i, v) in visible.to_pixels().into_iter().enumerate() {
            if v {
                labels[i] = LABEL_VISIBLE;
            }
        }
        for (i, v) in occluded.to_pixels().into_iter().enumerate() {
            if v {
                labels[i] = LABEL_OCCLUDED;
            }
        }
        Ok(Self {
            height: visible.height,
            width: visible.width,
            labels,
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Extracts `(visible, occluded)`. The two are disjoint by construction
    /// and their union is exactly the non-background region.
    pub fn split(&self) -> (BinaryMask, BinaryMask) {
        let visible: Vec<bool> = self.labels.iter().map(|&l| l == LABEL_VISIBLE).collect();
        let occluded: Vec<bool> = self.labels.iter().map(|&l| l == LABEL_OCCLUDED).collect();
        (
            BinaryMask::from_pixels(self.height, self.width, &visible)
                .expect("dimensions validated at construction"),
            BinaryMask::from_pixels(self.height, self.width, &occluded)
                .expect("dimensions validated at construction"),
        )
    }
}
