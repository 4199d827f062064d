//! Finite-difference validation of the loss-kernel gradients.
//!
//! For each kernel, random instances are generated from a seed and every
//! analytic gradient element is compared against a central difference of the
//! loss. The relative error metric is `|a - n| / max(|a|, |n|, 1e-6)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::loss::{
    classification_ce, sigmoid_ce, smooth_l1, softmax_ce, ClassScores, ScoreMap, SigmoidTargets,
    SoftmaxTargets,
};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const DEFAULT_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct GradCheckConfig {
    pub seed: u64,
    /// Random instances per kernel.
    pub instances: usize,
    /// Tensor sizes (height, width, channels) cycled over per instance.
    pub sizes: Vec<(usize, usize, usize)>,
    pub step: f64,
    pub tolerance: f64,
    /// Negative-control hook: flips the sign of every analytic gradient so
    /// the checker must report a failure.
    pub invert_sign: bool,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 100,
            sizes: vec![(4, 4, 3), (3, 5, 5), (2, 2, 8)],
            step: DEFAULT_STEP,
            tolerance: DEFAULT_TOLERANCE,
            invert_sign: false,
        }
    }
}

/// Outcome of checking one kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    pub kernel: String,
    pub instances: usize,
    pub elements_checked: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn rel_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

struct Tally {
    max_rel_error: f64,
    elements: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            max_rel_error: 0.0,
            elements: 0,
        }
    }

    fn record(&mut self, analytic: f64, numeric: f64) {
        self.max_rel_error = self.max_rel_error.max(rel_error(analytic, numeric));
        self.elements += 1;
    }
}

/// Checks `loss(data)` against its analytic gradient by perturbing each
/// element of `data` by ±step.
fn check_dense(
    data: &mut [f64],
    grad: &[f64],
    step: f64,
    invert: bool,
    tally: &mut Tally,
    mut loss: impl FnMut(&[f64]) -> f64,
) {
    let sign = if invert { -1.0 } else { 1.0 };
    for i in 0..data.len() {
        let orig = data[i];
        data[i] = orig + step;
        let plus = loss(data);
        data[i] = orig - step;
        let minus = loss(data);
        data[i] = orig;
        let numeric = (plus - minus) / (2.0 * step);
        tally.record(sign * grad[i], numeric);
    }
}

fn check_softmax(cfg: &GradCheckConfig, rng: &mut ChaCha8Rng) -> KernelReport {
    let mut tally = Tally::new();
    for k in 0..cfg.instances {
        let (h, w, c) = cfg.sizes[k % cfg.sizes.len()];
        let mut data: Vec<f64> = (0..h * w * c).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let labels: Vec<u32> = (0..h * w).map(|_| rng.gen_range(0..c as u32)).collect();
        let targets = SoftmaxTargets::dense(h, w, labels);
        let scores = ScoreMap::new(h, w, c, data.clone()).unwrap();
        let (_, grad) = softmax_ce(&scores, &targets).unwrap();
        check_dense(
            &mut data,
            grad.data(),
            cfg.step,
            cfg.invert_sign,
            &mut tally,
            |d| {
                let s = ScoreMap::new(h, w, c, d.to_vec()).unwrap();
                softmax_ce(&s, &targets).unwrap().0
            },
        );
    }
    report("softmax_ce", cfg, &tally)
}

fn check_sigmoid(cfg: &GradCheckConfig, rng: &mut ChaCha8Rng) -> KernelReport {
    let mut tally = Tally::new();
    for k in 0..cfg.instances {
        let (h, w, c) = cfg.sizes[k % cfg.sizes.len()];
        let mut data: Vec<f64> = (0..h * w * c).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let targets = SigmoidTargets {
            height: h,
            width: w,
            channels: c,
            bits: (0..h * w * c).map(|_| rng.gen()).collect(),
        };
        let scores = ScoreMap::new(h, w, c, data.clone()).unwrap();
        let (_, grad) = sigmoid_ce(&scores, &targets).unwrap();
        check_dense(
            &mut data,
            grad.data(),
            cfg.step,
            cfg.invert_sign,
            &mut tally,
            |d| {
                let s = ScoreMap::new(h, w, c, d.to_vec()).unwrap();
                sigmoid_ce(&s, &targets).unwrap().0
            },
        );
    }
    report("sigmoid_ce", cfg, &tally)
}

fn check_smooth_l1(cfg: &GradCheckConfig, rng: &mut ChaCha8Rng) -> KernelReport {
    let mut tally = Tally::new();
    for k in 0..cfg.instances {
        let (h, w, _) = cfg.sizes[k % cfg.sizes.len()];
        let n = (h * w).max(4);
        let target: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        // keep |pred - target| away from the |x| = 1 kink, where the loss is
        // only C^1 and central differences lose their quadratic accuracy
        let mut pred: Vec<f64> = Vec::with_capacity(n);
        for &t in &target {
            let x = loop {
                let x: f64 = rng.gen_range(-3.0..3.0);
                if (x.abs() - 1.0).abs() > 10.0 * cfg.step {
                    break x;
                }
            };
            pred.push(t + x);
        }
        let (_, grad) = smooth_l1(&pred, &target).unwrap();
        check_dense(
            &mut pred,
            &grad,
            cfg.step,
            cfg.invert_sign,
            &mut tally,
            |d| smooth_l1(d, &target).unwrap().0,
        );
    }
    report("smooth_l1", cfg, &tally)
}

fn check_classification(cfg: &GradCheckConfig, rng: &mut ChaCha8Rng) -> KernelReport {
    let mut tally = Tally::new();
    for k in 0..cfg.instances {
        let (h, _, c) = cfg.sizes[k % cfg.sizes.len()];
        let rois = h.max(2);
        let classes = c.max(2);
        let mut data: Vec<f64> = (0..rois * classes)
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect();
        let labels: Vec<u32> = (0..rois).map(|_| rng.gen_range(0..classes as u32)).collect();
        let scores = ClassScores::new(rois, classes, data.clone()).unwrap();
        let (_, grad) = classification_ce(&scores, &labels).unwrap();
        check_dense(
            &mut data,
            &grad.data,
            cfg.step,
            cfg.invert_sign,
            &mut tally,
            |d| {
                let s = ClassScores::new(rois, classes, d.to_vec()).unwrap();
                classification_ce(&s, &labels).unwrap().0
            },
        );
    }
    report("classification_ce", cfg, &tally)
}

fn report(kernel: &str, cfg: &GradCheckConfig, tally: &Tally) -> KernelReport {
    KernelReport {
        kernel: kernel.to_string(),
        instances: cfg.instances,
        elements_checked: tally.elements,
        max_rel_error: tally.max_rel_error,
        tolerance: cfg.tolerance,
        passed: tally.max_rel_error < cfg.tolerance,
    }
}

/// Runs the finite-difference suite over every kernel.
pub fn run_suite(cfg: &GradCheckConfig) -> Vec<KernelReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    vec![
        check_softmax(cfg, &mut rng),
        check_sigmoid(cfg, &mut rng),
        check_smooth_l1(cfg, &mut rng),
        check_classification(cfg, &mut rng),
    ]
}
