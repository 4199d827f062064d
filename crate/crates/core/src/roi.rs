//! Geometric kernels of the two-stage pipeline: quantization-free ROI
//! resampling (ROIAlign) and the center/size bounding-box delta
//! parameterization.

use thiserror::Error;

use crate::mask::BBox;

#[derive(Debug, Error)]
pub enum RoiError {
    #[error("feature data length {actual} does not match {channels}x{height}x{width}")]
    ShapeMismatch {
        channels: usize,
        height: usize,
        width: usize,
        actual: usize,
    },
    #[error("feature map contains a non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("ROI box is empty after clipping: {width}x{height}")]
    EmptyBox { width: f64, height: f64 },
    #[error("output size must be at least 1x1")]
    ZeroOutput,
    #[error("sampling ratio must be >= 1")]
    ZeroSamplingRatio,
    #[error("box has non-positive size {width}x{height}")]
    NonPositiveBox { width: f64, height: f64 },
    #[error("tensor file error: {0}")]
    TensorFile(String),
}

/// Real-valued feature tensor of shape `(channels, height, width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(
        channels: usize,
        height: usize,
        width: usize,
        data: Vec<f64>,
    ) -> Result<Self, RoiError> {
        if data.len() != channels * height * width {
            return Err(RoiError::ShapeMismatch {
                channels,
                height,
                width,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(RoiError::NonFiniteValue(i));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> f64 {
        self.data[(channel * self.height + row) * self.width + col]
    }

    /// Reads a `(C, H, W)` tensor from the shared binary tensor format.
    pub fn read_tensor_file(path: &std::path::Path) -> Result<Self, RoiError> {
        let (dims, data) = crate::tensor_io::read_tensor(path)
            .map_err(|e| RoiError::TensorFile(e.to_string()))?;
        if dims.len() != 3 {
            return Err(RoiError::TensorFile(format!("expected rank 3, got {dims:?}")));
        }
        Self::new(dims[0] as usize, dims[1] as usize, dims[2] as usize, data)
    }

    pub fn write_tensor_file(&self, path: &std::path::Path) -> Result<(), RoiError> {
        crate::tensor_io::write_tensor(
            path,
            &[self.channels as u64, self.height as u64, self.width as u64],
            &self.data,
        )
        .map_err(|e| RoiError::TensorFile(e.to_string()))
    }

    /// Bilinear sample at continuous `(x, y)` where pixel `(r, c)` has its
    /// center at `(c + 0.5, r + 0.5)`. Neighbors outside the map contribute
    /// zero (bilinear extension with zero padding). Interpolation uses the
    /// lerp form `a + t (b - a)`, which reproduces constant inputs exactly.
    fn sample_bilinear(&self, channel: usize, x: f64, y: f64) -> f64 {
        let fx = x - 0.5;
        let fy = y - 0.5;
        let c0 = fx.floor();
        let r0 = fy.floor();
        let tx = fx - c0;
        let ty = fy - r0;
        let at = |r: i64, c: i64| -> f64 {
            if r >= 0 && c >= 0 && (r as usize) < self.height && (c as usize) < self.width {
                self.get(channel, r as usize, c as usize)
            } else {
                0.0
            }
        };
        let (r0, c0) = (r0 as i64, c0 as i64);
        let top = lerp(at(r0, c0), at(r0, c0 + 1), tx);
        let bottom = lerp(at(r0 + 1, c0), at(r0 + 1, c0 + 1), tx);
        lerp(top, bottom, ty)
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// One ROI to resample: a box in feature-map coordinates, the output grid
/// size, and the number of bilinear samples per bin side.
#[derive(Debug, Clone)]
pub struct RoiSpec {
    pub bbox: BBox,
    pub output: (usize, usize),
    pub sampling_ratio: usize,
}

pub const DEFAULT_SAMPLING_RATIO: usize = 2;

/// Resamples the ROI into a fixed `(channels, h_out, w_out)` grid. Each
/// output bin averages `sampling_ratio^2` bilinear samples placed at the
/// regular positions `(i + 0.5) / sampling_ratio` inside the bin. No
/// coordinate quantization happens anywhere.
pub fn roi_align(features: &FeatureMap, roi: &RoiSpec) -> Result<FeatureMap, RoiError> {
    let (channels, fh, fw) = features.shape();
    let (h_out, w_out) = roi.output;
    if h_out == 0 || w_out == 0 {
        return Err(RoiError::ZeroOutput);
    }
    if roi.sampling_ratio == 0 {
        return Err(RoiError::ZeroSamplingRatio);
    }
    // boxes may extend at most half a pixel beyond the canvas
    let x_min = roi.bbox.x_min.clamp(-0.5, fw as f64 + 0.5);
    let x_max = roi.bbox.x_max.clamp(-0.5, fw as f64 + 0.5);
    let y_min = roi.bbox.y_min.clamp(-0.5, fh as f64 + 0.5);
    let y_max = roi.bbox.y_max.clamp(-0.5, fh as f64 + 0.5);
    let roi_w = x_max - x_min;
    let roi_h = y_max - y_min;
    if roi_w <= 0.0 || roi_h <= 0.0 {
        return Err(RoiError::EmptyBox {
            width: roi_w,
            height: roi_h,
        });
    }

    let bin_w = roi_w / w_out as f64;
    let bin_h = roi_h / h_out as f64;
    let s = roi.sampling_ratio;

    let mut out = vec![0.0; channels * h_out * w_out];
    for ch in 0..channels {
        for by in 0..h_out {
            for bx in 0..w_out {
                // running mean over the bin's samples: exact when all
                // samples agree, which keeps constant maps constant
                let mut mean = 0.0;
                let mut count = 0.0;
                for sy in 0..s {
                    let y = y_min + bin_h * (by as f64 + (sy as f64 + 0.5) / s as f64);
                    for sx in 0..s {
                        let x = x_min + bin_w * (bx as f64 + (sx as f64 + 0.5) / s as f64);
                        count += 1.0;
                        let sample = features.sample_bilinear(ch, x, y);
                        mean += (sample - mean) / count;
                    }
                }
                out[(ch * h_out + by) * w_out + bx] = mean;
            }
        }
    }
    FeatureMap::new(channels, h_out, w_out, out)
}

/// Box regression deltas in the center/size parameterization:
/// `tx = (x - xa)/wa`, `ty = (y - ya)/ha`, `tw = ln(w/wa)`, `th = ln(h/ha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDeltas {
    pub tx: f64,
    pub ty: f64,
    pub tw: f64,
    pub th: f64,
}

/// Default clamp for the decoded `exp` argument; keeps pathological deltas
/// from overflowing while leaving realistic size ratios untouched.
pub const DEFAULT_MAX_EXP_ARG: f64 = 10.0;

pub fn box_encode(anchor: &BBox, gt: &BBox) -> Result<BoxDeltas, RoiError> {
    let (wa, ha) = positive_size(anchor)?;
    let (wg, hg) = positive_size(gt)?;
    let (xa, ya) = anchor.center();
    let (xg, yg) = gt.center();
    Ok(BoxDeltas {
        tx: (xg - xa) / wa,
        ty: (yg - ya) / ha,
        tw: (wg / wa).ln(),
        th: (hg / ha).ln(),
    })
}

pub fn box_decode(anchor: &BBox, deltas: &BoxDeltas, max_exp_arg: f64) -> Result<BBox, RoiError> {
    let (wa, ha) = positive_size(anchor)?;
    let (xa, ya) = anchor.center();
    let x = deltas.tx * wa + xa;
    let y = deltas.ty * ha + ya;
    let w = wa * deltas.tw.min(max_exp_arg).exp();
    let h = ha * deltas.th.min(max_exp_arg).exp();
    BBox::new(x - w / 2.0, y - h / 2.0, x + w / 2.0, y + h / 2.0)
        .map_err(|_| RoiError::NonPositiveBox { width: w, height: h })
}

fn positive_size(b: &BBox) -> Result<(f64, f64), RoiError> {
    let w = b.width();
    let h = b.height();
    if w <= 0.0 || h <= 0.0 {
        return Err(RoiError::NonPositiveBox {
            width: w,
            height: h,
        });
    }
    Ok((w, h))
}
