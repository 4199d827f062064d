//! Loss kernels with analytic gradients, plus lambda-weighted aggregation of
//! the instance and semantic loss groups.
//!
//! All kernels are pure functions over externally supplied score tensors in
//! double precision. Dense losses are normalized per pixel, the sigmoid loss
//! per element, and ROI losses per ROI, so the balancing weight keeps a
//! scale-independent meaning. Reductions use a fixed summation order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("score tensor contains a non-finite value at index {0}")]
    NonFiniteScore(usize),
    #[error("data length {actual} does not match shape {shape:?}")]
    ShapeMismatch { shape: Vec<usize>, actual: usize },
    #[error("scores are {0}x{1}x{2} but targets are {3}x{4}")]
    TargetMismatch(usize, usize, usize, usize, usize),
    #[error("target channel count {actual} does not match scores ({expected})")]
    ChannelMismatch { expected: usize, actual: usize },
    #[error("softmax needs at least 2 channels, got {0}")]
    TooFewChannels(usize),
    #[error("label {label} at pixel {index} is outside 0..{channels}")]
    LabelOutOfRange {
        index: usize,
        label: u32,
        channels: usize,
    },
    #[error("no non-ignored pixels to average over")]
    EmptyEffectiveSet,
    #[error("input vectors are empty")]
    EmptyInput,
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("loss component {0} is not finite")]
    NonFiniteComponent(&'static str),
    #[error("lambda must be finite and >= 0, got {0}")]
    InvalidLambda(f64),
    #[error("tensor file error: {0}")]
    TensorFile(String),
}

/// Dense score tensor of shape `(height, width, channels)`, row-major with
/// channels innermost. Doubles throughout; also serves as gradient storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMap {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ScoreMap {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, LossError> {
        if data.len() != height * width * channels {
            return Err(LossError::ShapeMismatch {
                shape: vec![height, width, channels],
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(LossError::NonFiniteScore(i));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
            data: vec![0.0; height * width * channels],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + channel]
    }

    /// Elementwise scaling; applies e.g. the lambda factor owed by gradients
    /// of semantic components.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Reads a `(H, W, C)` tensor from the shared binary tensor format.
    pub fn read_tensor_file(path: &std::path::Path) -> Result<Self, LossError> {
        let (dims, data) = crate::tensor_io::read_tensor(path)
            .map_err(|e| LossError::TensorFile(e.to_string()))?;
        if dims.len() != 3 {
            return Err(LossError::TensorFile(format!(
                "expected rank 3, got {:?}",
                dims
            )));
        }
        Self::new(dims[0] as usize, dims[1] as usize, dims[2] as usize, data)
    }

    pub fn write_tensor_file(&self, path: &std::path::Path) -> Result<(), LossError> {
        crate::tensor_io::write_tensor(
            path,
            &[self.height as u64, self.width as u64, self.channels as u64],
            &self.data,
        )
        .map_err(|e| LossError::TensorFile(e.to_string()))
    }

    fn pixel_scores(&self, pixel: usize) -> &[f64] {
        let start = pixel * self.channels;
        &self.data[start..start + self.channels]
    }
}

/// Integer labels for softmax losses, with an optional ignore mask excluding
/// pixels from the mean.
#[derive(Debug, Clone)]
pub struct SoftmaxTargets {
    pub height: usize,
    pub width: usize,
    pub labels: Vec<u32>,
    pub ignore: Option<Vec<bool>>,
}

impl SoftmaxTargets {
    pub fn dense(height: usize, width: usize, labels: Vec<u32>) -> Self {
        Self {
            height,
            width,
            labels,
            ignore: None,
        }
    }
}

/// Per-channel binary targets for the sigmoid loss. Channels are independent:
/// a pixel may be on in several channels at once.
#[derive(Debug, Clone)]
pub struct SigmoidTargets {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub bits: Vec<bool>,
}

fn log_sum_exp(scores: &[f64]) -> f64 {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + scores.iter().map(|&s| (s - m).exp()).sum::<f64>().ln()
}

/// Pixel-wise softmax cross entropy, averaged over non-ignored pixels.
/// Serves the 3-class instance mask head (background/visible/occluded) and
/// the semantic visible head. Returns the loss and its gradient w.r.t. the
/// scores: `(softmax - onehot) / n` per pixel.
pub fn softmax_ce(
    scores: &ScoreMap,
    targets: &SoftmaxTargets,
) -> Result<(f64, ScoreMap), LossError> {
    let (h, w, c) = scores.shape();
    if c < 2 {
        return Err(LossError::TooFewChannels(c));
    }
    if targets.height != h || targets.width != w || targets.labels.len() != h * w {
        return Err(LossError::TargetMismatch(h, w, c, targets.height, targets.width));
    }
    if let Some(ignore) = &targets.ignore {
        if ignore.len() != h * w {
            return Err(LossError::TargetMismatch(h, w, c, targets.height, targets.width));
        }
    }
    let active = |pixel: usize| targets.ignore.as_ref().map_or(true, |ig| !ig[pixel]);
    let n = (0..h * w).filter(|&p| active(p)).count();
    if n == 0 {
        return Err(LossError::EmptyEffectiveSet);
    }
    for (pixel, &label) in targets.labels.iter().enumerate() {
        if active(pixel) && label as usize >= c {
            return Err(LossError::LabelOutOfRange {
                index: pixel,
                label,
                channels: c,
            });
        }
    }

    let mut grad = ScoreMap::zeros(h, w, c);
    let inv_n = 1.0 / n as f64;
    let mut loss = 0.0;
    for pixel in 0..h * w {
        if !active(pixel) {
            continue;
        }
        let s = scores.pixel_scores(pixel);
        let lse = log_sum_exp(s);
        let label = targets.labels[pixel] as usize;
        loss += lse - s[label];
        let gp = &mut grad.data_mut()[pixel * c..(pixel + 1) * c];
        for (ch, g) in gp.iter_mut().enumerate() {
            let p = (s[ch] - lse).exp();
            *g = (p - if ch == label { 1.0 } else { 0.0 }) * inv_n;
        }
    }
    Ok((loss * inv_n, grad))
}

/// Element-wise sigmoid cross entropy averaged over all `(pixel, channel)`
/// elements, in the numerically stable form
/// `max(s, 0) - s*t + ln(1 + exp(-|s|))`. The per-channel sums are
/// accumulated separately and combined at the end, so the loss decomposes
/// exactly into the mean of per-channel losses.
pub fn sigmoid_ce(
    scores: &ScoreMap,
    targets: &SigmoidTargets,
) -> Result<(f64, ScoreMap), LossError> {
    let (h, w, c) = scores.shape();
    if targets.height != h || targets.width != w {
        return Err(LossError::TargetMismatch(h, w, c, targets.height, targets.width));
    }
    if targets.channels != c {
        return Err(LossError::ChannelMismatch {
            expected: c,
            actual: targets.channels,
        });
    }
    if targets.bits.len() != h * w * c {
        return Err(LossError::ShapeMismatch {
            shape: vec![h, w, c],
            actual: targets.bits.len(),
        });
    }
    let n = h * w * c;
    let inv_n = 1.0 / n as f64;
    let mut channel_sums = vec![0.0f64; c];
    let mut grad = ScoreMap::zeros(h, w, c);
    for (i, (&s, &bit)) in scores.data().iter().zip(&targets.bits).enumerate() {
        let t = if bit { 1.0 } else { 0.0 };
        channel_sums[i % c] += s.max(0.0) - s * t + (-s.abs()).exp().ln_1p();
        let sigma = 1.0 / (1.0 + (-s).exp());
        grad.data_mut()[i] = (sigma - t) * inv_n;
    }
    let loss = channel_sums.iter().sum::<f64>() * inv_n;
    Ok((loss, grad))
}

/// Smooth-L1 loss over box regression deltas, averaged over elements:
/// `0.5 x^2` for `|x| < 1`, `|x| - 0.5` otherwise, with `x = pred - target`.
pub fn smooth_l1(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), LossError> {
    if pred.is_empty() {
        return Err(LossError::EmptyInput);
    }
    if pred.len() != target.len() {
        return Err(LossError::LengthMismatch(pred.len(), target.len()));
    }
    let inv_n = 1.0 / pred.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; pred.len()];
    for (i, (&p, &t)) in pred.iter().zip(target).enumerate() {
        let x = p - t;
        if x.abs() < 1.0 {
            loss += 0.5 * x * x;
            grad[i] = x * inv_n;
        } else {
            loss += x.abs() - 0.5;
            grad[i] = x.signum() * inv_n;
        }
    }
    Ok((loss * inv_n, grad))
}

/// Per-ROI class logits, shape `(rois, classes)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub rois: usize,
    pub classes: usize,
    pub data: Vec<f64>,
}

impl ClassScores {
    pub fn new(rois: usize, classes: usize, data: Vec<f64>) -> Result<Self, LossError> {
        if data.len() != rois * classes {
            return Err(LossError::ShapeMismatch {
                shape: vec![rois, classes],
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(LossError::NonFiniteScore(i));
        }
        Ok(Self {
            rois,
            classes,
            data,
        })
    }
}

/// Mean softmax cross entropy over ROIs: two classes for the RPN
/// foreground/background head, `n_class` for the box head.
pub fn classification_ce(
    scores: &ClassScores,
    labels: &[u32],
) -> Result<(f64, ClassScores), LossError> {
    if scores.rois == 0 {
        return Err(LossError::EmptyInput);
    }
    if scores.classes < 2 {
        return Err(LossError::TooFewChannels(scores.classes));
    }
    if labels.len() != scores.rois {
        return Err(LossError::LengthMismatch(scores.rois, labels.len()));
    }
    let c = scores.classes;
    for (i, &label) in labels.iter().enumerate() {
        if label as usize >= c {
            return Err(LossError::LabelOutOfRange {
                index: i,
                label,
                channels: c,
            });
        }
    }
    let inv_n = 1.0 / scores.rois as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; scores.data.len()];
    for (roi, &label) in labels.iter().enumerate() {
        let s = &scores.data[roi * c..(roi + 1) * c];
        let lse = log_sum_exp(s);
        loss += lse - s[label as usize];
        for ch in 0..c {
            let p = (s[ch] - lse).exp();
            grad[roi * c + ch] = (p - if ch == label as usize { 1.0 } else { 0.0 }) * inv_n;
        }
    }
    Ok((
        loss * inv_n,
        ClassScores {
            rois: scores.rois,
            classes: c,
            data: grad,
        },
    ))
}

/// The seven scalar loss components produced by the instance and semantic
/// heads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossComponents {
    pub rpn_box: f64,
    pub rpn_cls: f64,
    pub ins_box: f64,
    pub ins_cls: f64,
    pub ins_mask: f64,
    pub sem_vis: f64,
    pub sem_occ: f64,
}

/// Named loss components with the lambda-weighted joint total.
///
/// The instance group sums all five instance-side losses including the mask
/// loss; the joint total is `l_ins + lambda * l_sem`. Any gradient flowing
/// from a semantic component must be scaled by `lambda` (see
/// [`ScoreMap::scaled`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub l_rpn_box: f64,
    pub l_rpn_cls: f64,
    pub l_ins_box: f64,
    pub l_ins_cls: f64,
    pub l_ins_mask: f64,
    pub l_sem_vis: f64,
    pub l_sem_occ: f64,
    pub lambda: f64,
    pub l_ins: f64,
    pub l_sem: f64,
    pub total: f64,
}

pub const DEFAULT_LAMBDA: f64 = 0.25;

pub fn aggregate(c: &LossComponents, lambda: f64) -> Result<LossBreakdown, LossError> {
    let named = [
        ("rpn_box", c.rpn_box),
        ("rpn_cls", c.rpn_cls),
        ("ins_box", c.ins_box),
        ("ins_cls", c.ins_cls),
        ("ins_mask", c.ins_mask),
        ("sem_vis", c.sem_vis),
        ("sem_occ", c.sem_occ),
    ];
    for (name, value) in named {
        if !value.is_finite() {
            return Err(LossError::NonFiniteComponent(name));
        }
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(LossError::InvalidLambda(lambda));
    }
    let l_ins = c.rpn_box + c.rpn_cls + c.ins_box + c.ins_cls + c.ins_mask;
    let l_sem = c.sem_vis + c.sem_occ;
    Ok(LossBreakdown {
        l_rpn_box: c.rpn_box,
        l_rpn_cls: c.rpn_cls,
        l_ins_box: c.ins_box,
        l_ins_cls: c.ins_cls,
        l_ins_mask: c.ins_mask,
        l_sem_vis: c.sem_vis,
        l_sem_occ: c.sem_occ,
        lambda,
        l_ins,
        l_sem,
        total: l_ins + lambda * l_sem,
    })
}
