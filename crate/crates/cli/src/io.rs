//! Shared input loading: the eval and plan commands accept either the
//! predictions wire format or a frame-labels file from `dataset-build`,
//! detected by their top-level keys.

use std::path::Path;

use anyhow::{bail, Context, Result};

use occluseg_core::dataset::{ClassCatalog, FrameLabels};
use occluseg_core::planner::PlannerInstance;
use occluseg_core::pq::{instances_from_labels, predictions_from_json, EvalInstance};

pub struct LoadedInstances {
    /// Per-image instance lists, input order preserved.
    pub images: Vec<(String, Vec<EvalInstance>)>,
    /// Class names embedded in the file, when present.
    pub classes: Option<Vec<String>>,
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string())
}

/// Loads predictions-format or frame-labels-format JSON into evaluation
/// instances.
pub fn load_instances(path: &Path) -> Result<LoadedInstances> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("failed to read {}", path.display()))?;
    let probe: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    if probe.get("images").is_some() {
        let predictions = predictions_from_json(&text)
            .with_context(|| format!("invalid predictions file {}", path.display()))?;
        Ok(LoadedInstances {
            images: predictions.images,
            classes: predictions.classes,
        })
    } else if probe.get("semantic_visible").is_some() {
        let (labels, catalog) = FrameLabels::from_json(&text)
            .with_context(|| format!("invalid frame labels file {}", path.display()))?;
        Ok(LoadedInstances {
            images: vec![(file_stem(path), instances_from_labels(&labels))],
            classes: Some(catalog.names().to_vec()),
        })
    } else {
        bail!(
            "{}: expected a predictions file (key \"images\") or a frame labels file (key \"semantic_visible\")",
            path.display()
        );
    }
}

/// Loads the same two formats as planner instances. Prediction files must
/// contain exactly one image; instances without ids get 1-based input order.
pub fn load_planner_instances(path: &Path) -> Result<Vec<PlannerInstance>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("failed to read {}", path.display()))?;
    let probe: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    if probe.get("semantic_visible").is_some() {
        let (labels, _) = FrameLabels::from_json(&text)
            .with_context(|| format!("invalid frame labels file {}", path.display()))?;
        Ok(PlannerInstance::from_labels(&labels))
    } else if probe.get("images").is_some() {
        let predictions = predictions_from_json(&text)
            .with_context(|| format!("invalid predictions file {}", path.display()))?;
        if predictions.images.len() != 1 {
            bail!(
                "{}: planning needs exactly one image, found {}",
                path.display(),
                predictions.images.len()
            );
        }
        Ok(predictions.images[0]
            .1
            .iter()
            .enumerate()
            .map(|(i, inst)| PlannerInstance {
                id: i as u32 + 1,
                class_id: inst.class_id,
                visible: inst.visible.clone(),
                occluded: inst.occluded.clone(),
            })
            .collect())
    } else {
        bail!(
            "{}: expected a predictions file (key \"images\") or a frame labels file (key \"semantic_visible\")",
            path.display()
        );
    }
}

/// Builds the evaluation catalog: ground truth's embedded classes, then the
/// predictions', then an explicit catalog file, then synthesized names
/// covering every class id in use.
pub fn resolve_catalog(
    gt_classes: Option<&[String]>,
    pred_classes: Option<&[String]>,
    catalog_path: Option<&Path>,
    max_class_id: usize,
) -> Result<ClassCatalog> {
    if let Some(names) = gt_classes.or(pred_classes) {
        return Ok(ClassCatalog::new(names.to_vec())?);
    }
    if let Some(path) = catalog_path {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("failed to read catalog {}", path.display()))?;
        let names: Vec<String> = serde_json::from_str(&text)
            .with_context(|| format!("catalog {} must be a JSON array of names", path.display()))?;
        return Ok(ClassCatalog::new(names)?);
    }
    let names = (1..=max_class_id).map(|i| format!("class_{i}")).collect();
    Ok(ClassCatalog::new(names)?)
}

/// Writes machine-readable output to `--out` or stdout.
pub fn emit(json: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, json)
            .with_context(|| format!("failed to write {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}
