//! Panoptic-Quality evaluation of instance occlusion segmentation.
//!
//! A prediction matches a ground truth of the same class iff their IoU
//! exceeds 0.5 on the matching region. The matching region is the
//! visible-plus-occluded union by default, with a visible-only mode; both
//! sets of numbers appear in every report so the choice stays auditable.
//! Per class, `PQ = sum of matched IoUs / (TP + FP/2 + FN/2)`, and `mPQ`
//! averages PQ over the classes present on either side.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ClassCatalog, FrameLabels};
use crate::mask::{BinaryMask, MaskError};

pub const FORMAT_VERSION: u32 = 1;
pub const MATCH_IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum PqError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("instance {index}: visible and occluded masks overlap")]
    InstanceMasksOverlap { index: usize },
    #[error("instance {index}: confidence {confidence} is outside [0, 1]")]
    BadConfidence { index: usize, confidence: f64 },
    #[error("instance {index}: class id {class_id} is out of range for {n_class} classes")]
    ClassIdOutOfRange {
        index: usize,
        class_id: usize,
        n_class: usize,
    },
    #[error(
        "ground-truth instances {0} and {1} of class {2} overlap above the matching threshold in the visible channel"
    )]
    DuplicateGroundTruth(usize, usize, usize),
    #[error("no class is present in either predictions or ground truth")]
    EmptyEvaluation,
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("invalid JSON")]
    Schema(#[from] serde_json::Error),
}

/// Which region the matching IoU is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMode {
    /// Visible plus occluded region.
    Union,
    /// Visible region only.
    Visible,
}

impl std::fmt::Display for MatchingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatchingMode::Union => write!(f, "union"),
            MatchingMode::Visible => write!(f, "visible"),
        }
    }
}

/// One instance on either side of the evaluation. Ground-truth instances
/// carry confidence 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalInstance {
    pub class_id: usize,
    pub visible: BinaryMask,
    pub occluded: BinaryMask,
    pub confidence: f64,
}

impl EvalInstance {
    fn validate(&self, index: usize, n_class: usize) -> Result<(), PqError> {
        if self.visible.intersection_area(&self.occluded)? > 0 {
            return Err(PqError::InstanceMasksOverlap { index });
        }
        if !self.confidence.is_finite() || !(0.0..=1.0).contains(&self.confidence) {
            return Err(PqError::BadConfidence {
                index,
                confidence: self.confidence,
            });
        }
        if self.class_id == 0 || self.class_id >= n_class {
            return Err(PqError::ClassIdOutOfRange {
                index,
                class_id: self.class_id,
                n_class,
            });
        }
        Ok(())
    }

    fn region(&self, mode: MatchingMode) -> Result<BinaryMask, MaskError> {
        match mode {
            MatchingMode::Union => self.visible.union(&self.occluded),
            MatchingMode::Visible => Ok(self.visible.clone()),
        }
    }
}

/// Converts frame labels into evaluation instances (confidence 1).
pub fn instances_from_labels(labels: &FrameLabels) -> Vec<EvalInstance> {
    labels
        .instances
        .iter()
        .map(|i| EvalInstance {
            class_id: i.class_id,
            visible: i.visible.clone(),
            occluded: i.occluded.clone(),
            confidence: 1.0,
        })
        .collect()
}

/// A matched prediction/ground-truth pair with its IoU.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpMatch {
    pub pred: usize,
    pub gt: usize,
    pub iou: f64,
}

/// Result of matching one class on one canvas.
#[derive(Debug, Clone, Default)]
pub struct Matching {
    pub true_positives: Vec<TpMatch>,
    pub false_positives: Vec<usize>,
    pub false_negatives: Vec<usize>,
}

fn matching_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64, MaskError> {
    let inter = a.intersection_area(b)?;
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return Ok(0.0); // two empty regions never match
    }
    Ok(inter as f64 / union as f64)
}

/// Matches predictions against ground truths of one class. Pairs with IoU
/// above 0.5 are claimed greedily in order of descending IoU, breaking ties
/// by descending confidence and then input order, which makes the result
/// deterministic even when overlapping occluded regions defeat the
/// uniqueness guarantee of the visible channel.
pub fn match_instances(
    preds: &[EvalInstance],
    gts: &[EvalInstance],
    class_id: usize,
    mode: MatchingMode,
) -> Result<Matching, PqError> {
    let pred_idx: Vec<usize> = (0..preds.len())
        .filter(|&i| preds[i].class_id == class_id)
        .collect();
    let gt_idx: Vec<usize> = (0..gts.len())
        .filter(|&i| gts[i].class_id == class_id)
        .collect();

    // reject ground truths that duplicate each other in the visible channel
    for (a, &i) in gt_idx.iter().enumerate() {
        for &j in &gt_idx[a + 1..] {
            if matching_iou(&gts[i].visible, &gts[j].visible)? > MATCH_IOU_THRESHOLD {
                return Err(PqError::DuplicateGroundTruth(i, j, class_id));
            }
        }
    }

    let pred_regions: Vec<BinaryMask> = pred_idx
        .iter()
        .map(|&i| preds[i].region(mode))
        .collect::<Result<_, _>>()?;
    let gt_regions: Vec<BinaryMask> = gt_idx
        .iter()
        .map(|&i| gts[i].region(mode))
        .collect::<Result<_, _>>()?;

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, pr) in pred_regions.iter().enumerate() {
        for (gi, gr) in gt_regions.iter().enumerate() {
            let iou = matching_iou(pr, gr)?;
            if iou > MATCH_IOU_THRESHOLD {
                candidates.push((iou, pi, gi));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| {
                let ca = preds[pred_idx[a.1]].confidence;
                let cb = preds[pred_idx[b.1]].confidence;
                cb.partial_cmp(&ca).unwrap()
            })
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });

    let mut pred_used = vec![false; pred_idx.len()];
    let mut gt_used = vec![false; gt_idx.len()];
    let mut result = Matching::default();
    for (iou, pi, gi) in candidates {
        if !pred_used[pi] && !gt_used[gi] {
            pred_used[pi] = true;
            gt_used[gi] = true;
            result.true_positives.push(TpMatch {
                pred: pred_idx[pi],
                gt: gt_idx[gi],
                iou,
            });
        }
    }
    for (pi, used) in pred_used.iter().enumerate() {
        if !used {
            result.false_positives.push(pred_idx[pi]);
        }
    }
    for (gi, used) in gt_used.iter().enumerate() {
        if !used {
            result.false_negatives.push(gt_idx[gi]);
        }
    }
    Ok(result)
}

/// Per-class scores: `PQ = SQ * RQ` with `SQ` the mean matched IoU and
/// `RQ = TP / (TP + FP/2 + FN/2)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassPq {
    pub class_id: usize,
    pub name: String,
    pub pq: f64,
    pub sq: f64,
    pub rq: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
}

/// Accumulates matchings (possibly across images) into per-class scores.
#[derive(Debug, Clone, Copy, Default)]
struct ClassAccum {
    iou_sum: f64,
    tp: usize,
    fp: usize,
    fn_count: usize,
}

impl ClassAccum {
    fn add(&mut self, m: &Matching) {
        self.iou_sum += m.true_positives.iter().map(|t| t.iou).sum::<f64>();
        self.tp += m.true_positives.len();
        self.fp += m.false_positives.len();
        self.fn_count += m.false_negatives.len();
    }

    fn finish(&self, class_id: usize, name: String) -> ClassPq {
        let sq = if self.tp > 0 {
            self.iou_sum / self.tp as f64
        } else {
            0.0
        };
        let denom = self.tp as f64 + 0.5 * self.fp as f64 + 0.5 * self.fn_count as f64;
        let rq = if denom > 0.0 {
            self.tp as f64 / denom
        } else {
            0.0
        };
        ClassPq {
            class_id,
            name,
            pq: sq * rq,
            sq,
            rq,
            tp: self.tp,
            fp: self.fp,
            fn_count: self.fn_count,
        }
    }
}

/// Computes per-class scores for one matching (single canvas, single class).
pub fn pq_class(class_id: usize, name: &str, matching: &Matching) -> ClassPq {
    let mut acc = ClassAccum::default();
    acc.add(matching);
    acc.finish(class_id, name.to_string())
}

/// Scores for one matching mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeScores {
    pub mode: MatchingMode,
    pub per_class: Vec<ClassPq>,
    pub mpq: f64,
}

/// Full evaluation report. Scores are computed under both matching regions;
/// `primary` marks which one the caller asked for.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PqReport {
    pub format_version: u32,
    pub primary: MatchingMode,
    pub union: ModeScores,
    pub visible: ModeScores,
}

impl PqReport {
    /// Headline number under the primary matching mode.
    pub fn mpq(&self) -> f64 {
        match self.primary {
            MatchingMode::Union => self.union.mpq,
            MatchingMode::Visible => self.visible.mpq,
        }
    }

    pub fn primary_scores(&self) -> &ModeScores {
        match self.primary {
            MatchingMode::Union => &self.union,
            MatchingMode::Visible => &self.visible,
        }
    }

    /// Aligned text table over both matching modes.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for scores in [&self.union, &self.visible] {
            let marker = if scores.mode == self.primary { " (primary)" } else { "" };
            writeln!(out, "matching: {}{}", scores.mode, marker).unwrap();
            writeln!(
                out,
                "{:<24} {:>7} {:>7} {:>7} {:>5} {:>5} {:>5}",
                "class", "PQ", "SQ", "RQ", "TP", "FP", "FN"
            )
            .unwrap();
            for row in &scores.per_class {
                writeln!(
                    out,
                    "{:<24} {:>7.4} {:>7.4} {:>7.4} {:>5} {:>5} {:>5}",
                    row.name, row.pq, row.sq, row.rq, row.tp, row.fp, row.fn_count
                )
                .unwrap();
            }
            writeln!(out, "{:<24} {:>7.4}", "mPQ", scores.mpq).unwrap();
            writeln!(out).unwrap();
        }
        out
    }
}

/// Evaluates a multi-image prediction set against ground truth. Image pairs
/// are keyed by id; an image present on only one side counts fully as false
/// positives or false negatives.
pub fn mpq_images(
    preds_by_image: &[(String, Vec<EvalInstance>)],
    gts_by_image: &[(String, Vec<EvalInstance>)],
    catalog: &ClassCatalog,
    primary: MatchingMode,
) -> Result<PqReport, PqError> {
    let n_class = catalog.n_class();
    let empty: Vec<EvalInstance> = Vec::new();
    let mut image_ids: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for (id, _) in preds_by_image.iter().chain(gts_by_image) {
        if seen.insert(id.as_str()) {
            image_ids.push(id);
        }
    }

    let mut classes = BTreeSet::new();
    for (_, instances) in preds_by_image.iter().chain(gts_by_image) {
        for (i, inst) in instances.iter().enumerate() {
            inst.validate(i, n_class)?;
            classes.insert(inst.class_id);
        }
    }
    if classes.is_empty() {
        return Err(PqError::EmptyEvaluation);
    }

    fn lookup<'a>(
        side: &'a [(String, Vec<EvalInstance>)],
        id: &str,
        empty: &'a [EvalInstance],
    ) -> &'a [EvalInstance] {
        side.iter()
            .find(|(k, _)| k == id)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(empty)
    }

    let mut modes = Vec::new();
    for mode in [MatchingMode::Union, MatchingMode::Visible] {
        let mut per_class = Vec::new();
        for &class_id in &classes {
            let mut acc = ClassAccum::default();
            for &image in &image_ids {
                let preds = lookup(preds_by_image, image, &empty);
                let gts = lookup(gts_by_image, image, &empty);
                acc.add(&match_instances(preds, gts, class_id, mode)?);
            }
            let name = catalog
                .name_of(class_id)
                .unwrap_or("unknown")
                .to_string();
            per_class.push(acc.finish(class_id, name));
        }
        let mpq = per_class.iter().map(|c| c.pq).sum::<f64>() / per_class.len() as f64;
        modes.push(ModeScores {
            mode,
            per_class,
            mpq,
        });
    }
    let visible = modes.pop().unwrap();
    let union = modes.pop().unwrap();
    Ok(PqReport {
        format_version: FORMAT_VERSION,
        primary,
        union,
        visible,
    })
}

/// Single-canvas evaluation.
pub fn mpq(
    preds: &[EvalInstance],
    gts: &[EvalInstance],
    catalog: &ClassCatalog,
    primary: MatchingMode,
) -> Result<PqReport, PqError> {
    mpq_images(
        &[("image".to_string(), preds.to_vec())],
        &[("image".to_string(), gts.to_vec())],
        catalog,
        primary,
    )
}

// ---------------------------------------------------------------------------
// Predictions wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PredictionsFile {
    #[serde(default = "default_version")]
    format_version: u32,
    #[serde(default)]
    classes: Vec<String>,
    images: Vec<ImagePredictions>,
}

#[derive(Serialize, Deserialize)]
struct ImagePredictions {
    image_id: String,
    instances: Vec<InstanceRecord>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    class: usize,
    confidence: f64,
    visible: BinaryMask,
    occluded: BinaryMask,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// Parsed predictions: per-image instance lists plus the optional embedded
/// class names.
pub struct Predictions {
    pub images: Vec<(String, Vec<EvalInstance>)>,
    pub classes: Option<Vec<String>>,
}

pub fn predictions_from_json(json: &str) -> Result<Predictions, PqError> {
    let file: PredictionsFile = serde_json::from_str(json)?;
    if file.format_version != FORMAT_VERSION {
        return Err(PqError::UnsupportedVersion(file.format_version));
    }
    let images = file
        .images
        .into_iter()
        .map(|img| {
            let instances = img
                .instances
                .into_iter()
                .map(|r| EvalInstance {
                    class_id: r.class,
                    visible: r.visible,
                    occluded: r.occluded,
                    confidence: r.confidence,
                })
                .collect();
            (img.image_id, instances)
        })
        .collect();
    Ok(Predictions {
        images,
        classes: if file.classes.is_empty() {
            None
        } else {
            Some(file.classes)
        },
    })
}

pub fn predictions_to_json(
    images: &[(String, Vec<EvalInstance>)],
    classes: Option<&[String]>,
) -> Result<String, PqError> {
    let file = PredictionsFile {
        format_version: FORMAT_VERSION,
        classes: classes.map(<[String]>::to_vec).unwrap_or_default(),
        images: images
            .iter()
            .map(|(id, instances)| ImagePredictions {
                image_id: id.clone(),
                instances: instances
                    .iter()
                    .map(|i| InstanceRecord {
                        class: i.class_id,
                        confidence: i.confidence,
                        visible: i.visible.clone(),
                        occluded: i.occluded.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> ClassCatalog {
        ClassCatalog::new(vec!["book".into(), "tray".into()]).unwrap()
    }

    fn strip_mask(h: u32, w: u32, cols: std::ops::Range<u32>, row: u32) -> BinaryMask {
        let pixels: Vec<bool> = (0..h)
            .flat_map(|r| {
                let cols = cols.clone();
                (0..w).map(move |c| r == row && cols.contains(&c))
            })
            .collect();
        BinaryMask::from_pixels(h, w, &pixels).unwrap()
    }

    fn inst(class_id: usize, visible: BinaryMask, confidence: f64) -> EvalInstance {
        let (h, w) = (visible.height(), visible.width());
        EvalInstance {
            class_id,
            visible,
            occluded: BinaryMask::empty(h, w).unwrap(),
            confidence,
        }
    }

    #[test]
    fn perfect_predictions_score_one() {
        let gts = vec![
            inst(1, strip_mask(8, 16, 0..10, 1), 1.0),
            inst(2, strip_mask(8, 16, 2..12, 4), 1.0),
        ];
        let report = mpq(&gts, &gts, &catalog(), MatchingMode::Union).unwrap();
        assert_eq!(report.mpq(), 1.0);
        assert_eq!(report.visible.mpq, 1.0);
        for row in &report.union.per_class {
            assert_eq!(row.pq, 1.0);
            assert_eq!((row.tp, row.fp, row.fn_count), (1, 0, 0));
        }
    }

    #[test]
    fn no_predictions_means_all_false_negatives() {
        let gts = vec![inst(1, strip_mask(8, 16, 0..10, 1), 1.0)];
        let report = mpq(&[], &gts, &catalog(), MatchingMode::Union).unwrap();
        assert_eq!(report.mpq(), 0.0);
        let row = &report.union.per_class[0];
        assert_eq!((row.tp, row.fp, row.fn_count), (0, 0, 1));
    }

    #[test]
    fn greedy_match_prefers_higher_iou() {
        // pred covers gt1 with IoU 0.6 and gt2 with IoU 0.2
        let pred = inst(1, strip_mask(4, 20, 0..10, 0), 0.9);
        let gt1 = inst(1, strip_mask(4, 20, 0..6, 0), 1.0); // inter 6, union 10
        let gt2 = inst(1, strip_mask(4, 20, 8..18, 0), 1.0); // inter 2, union 18
        let m = match_instances(&[pred], &[gt1, gt2], 1, MatchingMode::Visible).unwrap();
        assert_eq!(m.true_positives.len(), 1);
        assert_eq!(m.true_positives[0].gt, 0);
        assert!((m.true_positives[0].iou - 0.6).abs() < 1e-12);
        assert_eq!(m.false_negatives, vec![1]);
    }

    #[test]
    fn pq_point_four_fixture() {
        // one TP at IoU 0.6 plus one FP: PQ = 0.6 / (1 + 0.5) = 0.4
        let preds = vec![
            inst(1, strip_mask(6, 20, 0..6, 0), 0.9),
            inst(1, strip_mask(6, 20, 0..8, 4), 0.8),
        ];
        let gts = vec![inst(1, strip_mask(6, 20, 0..10, 0), 1.0)];
        let report = mpq(&preds, &gts, &catalog(), MatchingMode::Visible).unwrap();
        let row = report
            .visible
            .per_class
            .iter()
            .find(|c| c.class_id == 1)
            .unwrap();
        assert!((row.pq - 0.4).abs() < 1e-12, "PQ was {}", row.pq);
        assert_eq!((row.tp, row.fp, row.fn_count), (1, 1, 0));
    }

    #[test]
    fn absent_classes_are_skipped() {
        // catalog has 2 classes but only class 1 appears anywhere
        let gts = vec![inst(1, strip_mask(8, 16, 0..10, 1), 1.0)];
        let report = mpq(&gts, &gts, &catalog(), MatchingMode::Union).unwrap();
        assert_eq!(report.union.per_class.len(), 1);
        assert_eq!(report.mpq(), 1.0);
    }

    #[test]
    fn mpq_is_unweighted_mean() {
        // class 1 perfect, class 2 entirely missed
        let gts = vec![
            inst(1, strip_mask(8, 16, 0..10, 1), 1.0),
            inst(2, strip_mask(8, 16, 2..12, 4), 1.0),
        ];
        let preds = vec![gts[0].clone()];
        let report = mpq(&preds, &gts, &catalog(), MatchingMode::Union).unwrap();
        assert_eq!(report.mpq(), 0.5);
    }

    #[test]
    fn empty_evaluation_is_an_error() {
        assert!(matches!(
            mpq(&[], &[], &catalog(), MatchingMode::Union),
            Err(PqError::EmptyEvaluation)
        ));
    }

    #[test]
    fn duplicate_ground_truth_rejected() {
        let m = strip_mask(4, 16, 0..10, 0);
        let gts = vec![inst(1, m.clone(), 1.0), inst(1, m, 1.0)];
        assert!(matches!(
            mpq(&[], &gts, &catalog(), MatchingMode::Union),
            Err(PqError::DuplicateGroundTruth(0, 1, 1))
        ));
    }

    #[test]
    fn zero_overlap_prediction_strictly_decreases_pq() {
        let gts = vec![inst(1, strip_mask(8, 16, 0..10, 1), 1.0)];
        let base = mpq(&gts, &gts, &catalog(), MatchingMode::Union).unwrap();
        let mut preds = gts.clone();
        preds.push(inst(1, strip_mask(8, 16, 0..4, 6), 0.5));
        let spoiled = mpq(&preds, &gts, &catalog(), MatchingMode::Union).unwrap();
        assert!(spoiled.mpq() < base.mpq());
    }

    #[test]
    fn symmetric_when_confidences_equal() {
        let a = vec![
            inst(1, strip_mask(8, 16, 0..10, 1), 1.0),
            inst(2, strip_mask(8, 16, 2..12, 4), 1.0),
        ];
        let b = vec![
            inst(1, strip_mask(8, 16, 1..11, 1), 1.0),
            inst(2, strip_mask(8, 16, 0..9, 5), 1.0),
        ];
        let ab = mpq(&a, &b, &catalog(), MatchingMode::Visible).unwrap();
        let ba = mpq(&b, &a, &catalog(), MatchingMode::Visible).unwrap();
        assert_eq!(ab.visible.mpq, ba.visible.mpq);
    }

    #[test]
    fn instance_order_does_not_matter() {
        let gts = vec![
            inst(1, strip_mask(8, 16, 0..10, 1), 1.0),
            inst(1, strip_mask(8, 16, 2..12, 4), 1.0),
        ];
        let preds_fwd = gts.clone();
        let preds_rev: Vec<_> = gts.iter().rev().cloned().collect();
        let a = mpq(&preds_fwd, &gts, &catalog(), MatchingMode::Union).unwrap();
        let b = mpq(&preds_rev, &gts, &catalog(), MatchingMode::Union).unwrap();
        assert_eq!(a.mpq(), b.mpq());
    }

    #[test]
    fn published_reference_scores_parse_as_fixtures() {
        // headline numbers from trained models live in report files; they
        // are carried, parsed, and compared, never recomputed here
        let fixture = |mpq: f64| {
            format!(
                r#"{{
                  "format_version": 1,
                  "primary": "union",
                  "union": {{"mode": "union", "per_class": [], "mpq": {mpq}}},
                  "visible": {{"mode": "visible", "per_class": [], "mpq": {mpq}}}
                }}"#
            )
        };
        let instance_only: PqReport = serde_json::from_str(&fixture(0.410)).unwrap();
        let joint: PqReport = serde_json::from_str(&fixture(0.422)).unwrap();
        assert_eq!(instance_only.mpq(), 0.410);
        assert_eq!(joint.mpq(), 0.422);
        assert!(joint.mpq() > instance_only.mpq());
    }

    #[test]
    fn predictions_json_roundtrip() {
        let images = vec![(
            "frame0".to_string(),
            vec![inst(1, strip_mask(4, 8, 0..5, 1), 0.75)],
        )];
        let json = predictions_to_json(&images, Some(&["book".into(), "tray".into()])).unwrap();
        let parsed = predictions_from_json(&json).unwrap();
        assert_eq!(parsed.images.len(), 1);
        assert_eq!(parsed.images[0].1[0].confidence, 0.75);
        assert_eq!(parsed.classes.as_deref().unwrap().len(), 2);
    }
}
