//! Subcommand implementations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use occluseg_core::augment::{augment_sample, sample_params, Sample};
use occluseg_core::dataset::{backproject, load_dataset, FrameLabels};
use occluseg_core::gradcheck::{run_suite, GradCheckConfig, KernelReport};
use occluseg_core::loss::{aggregate, LossBreakdown, LossComponents};
use occluseg_core::planner::{build_graph, next_random_pick, plan_target_pick};
use occluseg_core::pq::{mpq_images, MatchingMode};

use crate::config::Config;
use crate::io::{emit, load_instances, load_planner_instances, resolve_catalog};

const FORMAT_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// dataset-build
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DatasetBuildIndex {
    format_version: u32,
    files: Vec<String>,
}

pub fn dataset_build(dataset_path: &Path, out_dir: &Path) -> Result<()> {
    let dataset = load_dataset(dataset_path)
        .with_context(|| format!("failed to load dataset {}", dataset_path.display()))?;
    if dataset.videos.is_empty() {
        eprintln!("warning: dataset contains no videos; nothing to build");
        let index = DatasetBuildIndex {
            format_version: FORMAT_VERSION,
            files: vec![],
        };
        println!("{}", serde_json::to_string_pretty(&index)?);
        return Ok(());
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("failed to create {}", out_dir.display()))?;

    let frames_per_video: Vec<Vec<FrameLabels>> = dataset
        .videos
        .par_iter()
        .map(|video| backproject(video, &dataset.catalog, dataset.height, dataset.width))
        .collect::<Result<_, _>>()?;

    let mut files = Vec::new();
    for (v, frames) in frames_per_video.iter().enumerate() {
        for labels in frames {
            let name = format!("video{v:02}_frame{:03}.json", labels.frame);
            let path = out_dir.join(&name);
            std::fs::write(&path, labels.to_json(&dataset.catalog)?)
                .with_context(|| format!("failed to write {}", path.display()))?;
            files.push(name);
        }
    }
    eprintln!(
        "built {} label file(s) from {} video(s) into {}",
        files.len(),
        dataset.videos.len(),
        out_dir.display()
    );
    let index = DatasetBuildIndex {
        format_version: FORMAT_VERSION,
        files,
    };
    println!("{}", serde_json::to_string_pretty(&index)?);
    Ok(())
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

pub fn augment(
    images: &[PathBuf],
    labels: &[PathBuf],
    out_dir: &Path,
    seed: Option<u64>,
    config: &Config,
) -> Result<()> {
    if images.len() != labels.len() {
        bail!(
            "--image and --labels must be paired: got {} image(s) and {} label file(s)",
            images.len(),
            labels.len()
        );
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("failed to create {}", out_dir.display()))?;
    let base_seed = seed.unwrap_or_else(|| config.seed());

    let samples: Vec<(String, Sample)> = images
        .iter()
        .zip(labels)
        .map(|(image_path, labels_path)| {
            let image = image::open(image_path)
                .with_context(|| format!("failed to read image {}", image_path.display()))?
                .to_rgb8();
            let text = std::fs::read_to_string(labels_path)
                .with_context(|| format!("failed to read {}", labels_path.display()))?;
            let (frame, _) = FrameLabels::from_json(&text)
                .with_context(|| format!("invalid frame labels {}", labels_path.display()))?;
            let stem = image_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sample".to_string());
            Ok((stem, Sample::new(image, frame)?))
        })
        .collect::<Result<_>>()?;

    // samples are independent; per-sample seeds keep the output reproducible
    // regardless of scheduling
    let outputs: Vec<(String, Sample)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, (stem, sample))| {
            let ranges = config.augment_ranges(sample.image.height(), sample.image.width());
            let params = sample_params(&ranges, base_seed.wrapping_add(i as u64))?;
            let augmented = augment_sample(sample, &params)?;
            Ok((stem.clone(), augmented))
        })
        .collect::<Result<_>>()?;

    let classes = classes_from_labels(&labels[0])?;
    let catalog = occluseg_core::dataset::ClassCatalog::new(classes)?;
    let mut written = Vec::new();
    for (stem, sample) in &outputs {
        let png_path = out_dir.join(format!("{stem}_aug.png"));
        sample
            .image
            .save(&png_path)
            .with_context(|| format!("failed to write {}", png_path.display()))?;
        let json_path = out_dir.join(format!("{stem}_aug.json"));
        std::fs::write(&json_path, sample.labels.to_json(&catalog)?)
            .with_context(|| format!("failed to write {}", json_path.display()))?;
        written.push(format!("{stem}_aug"));
    }
    eprintln!("augmented {} sample(s) into {}", written.len(), out_dir.display());
    let index = DatasetBuildIndex {
        format_version: FORMAT_VERSION,
        files: written,
    };
    println!("{}", serde_json::to_string_pretty(&index)?);
    Ok(())
}

fn classes_from_labels(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let (_, catalog) = FrameLabels::from_json(&text)
        .with_context(|| format!("invalid frame labels {}", path.display()))?;
    Ok(catalog.names().to_vec())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub fn eval(
    predictions_path: &Path,
    ground_truth_path: &Path,
    matching: Option<MatchingMode>,
    out: Option<&Path>,
    config: &Config,
) -> Result<()> {
    let predictions = load_instances(predictions_path)?;
    let ground_truth = load_instances(ground_truth_path)?;
    let max_class = predictions
        .images
        .iter()
        .chain(&ground_truth.images)
        .flat_map(|(_, v)| v)
        .map(|i| i.class_id)
        .max()
        .unwrap_or(0);
    let catalog = resolve_catalog(
        ground_truth.classes.as_deref(),
        predictions.classes.as_deref(),
        config.catalog.as_deref(),
        max_class,
    )?;
    let mode = matching.unwrap_or_else(|| config.matching());
    let report = mpq_images(&predictions.images, &ground_truth.images, &catalog, mode)?;
    eprint!("{}", report.table());
    emit(&serde_json::to_string_pretty(&report)?, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RandomPickFile {
    format_version: u32,
    instance_id: u32,
    suction_point: (u32, u32),
    degraded: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn plan(
    labels_path: &Path,
    target: Option<u32>,
    random: bool,
    edge_threshold: Option<f64>,
    visible_eps: Option<f64>,
    out: Option<&Path>,
    config: &Config,
) -> Result<()> {
    if target.is_none() && !random {
        bail!("plan needs either --target <id> or --random");
    }
    let instances = load_planner_instances(labels_path)?;
    let threshold = edge_threshold.unwrap_or_else(|| config.edge_threshold());
    let graph = build_graph(&instances, threshold)?;

    if let Some(target_id) = target {
        let plan = plan_target_pick(&graph, target_id)?;
        plan.verify_against(&graph)?;
        for warning in &plan.warnings {
            eprintln!("warning: {warning}");
        }
        emit(&serde_json::to_string_pretty(&plan)?, out)?;
    } else {
        let eps = visible_eps.unwrap_or_else(|| config.visible_eps());
        let pick = next_random_pick(&graph, eps)?;
        if pick.degraded {
            eprintln!("warning: no fully visible instance; picking the least occluded one");
        }
        let file = RandomPickFile {
            format_version: FORMAT_VERSION,
            instance_id: pick.instance_id,
            suction_point: pick.suction_point,
            degraded: pick.degraded,
        };
        emit(&serde_json::to_string_pretty(&file)?, out)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// losscheck
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LosscheckReport {
    format_version: u32,
    kernels: Vec<KernelReport>,
    lambda_sweep: Vec<LossBreakdown>,
    all_passed: bool,
}

pub fn losscheck(
    seed: Option<u64>,
    sizes: Option<&str>,
    lambda: Option<f64>,
    inject_wrong_sign: bool,
    out: Option<&Path>,
    config: &Config,
) -> Result<()> {
    let mut cfg = GradCheckConfig {
        seed: seed.unwrap_or_else(|| config.seed()),
        invert_sign: inject_wrong_sign,
        ..GradCheckConfig::default()
    };
    if let Some(spec) = sizes {
        cfg.sizes = parse_sizes(spec)?;
    }
    let kernels = run_suite(&cfg);
    for report in &kernels {
        eprintln!(
            "{:18} {} instances, {} elements, max rel error {:.3e} (tol {:.0e}): {}",
            report.kernel,
            report.instances,
            report.elements_checked,
            report.max_rel_error,
            report.tolerance,
            if report.passed { "pass" } else { "FAIL" }
        );
    }

    // joint totals for the example components (instance sum 2, semantic
    // sum 4) across the standard balancing weights
    let components = LossComponents {
        rpn_box: 0.5,
        rpn_cls: 0.5,
        ins_box: 0.5,
        ins_cls: 0.25,
        ins_mask: 0.25,
        sem_vis: 2.5,
        sem_occ: 1.5,
    };
    let mut lambdas = vec![1.0, 0.5, 0.25, 0.1];
    let extra = lambda.unwrap_or_else(|| config.lambda());
    if !lambdas.contains(&extra) {
        lambdas.push(extra);
    }
    let mut lambda_sweep = Vec::new();
    for lambda in lambdas {
        let b = aggregate(&components, lambda)?;
        eprintln!(
            "lambda {:>5}: l_ins {:.4} + lambda * l_sem {:.4} = total {:.4}",
            lambda, b.l_ins, b.l_sem, b.total
        );
        lambda_sweep.push(b);
    }

    let all_passed = kernels.iter().all(|k| k.passed);
    let report = LosscheckReport {
        format_version: FORMAT_VERSION,
        kernels,
        lambda_sweep,
        all_passed,
    };
    emit(&serde_json::to_string_pretty(&report)?, out)?;
    if !all_passed {
        bail!("gradient check failed for at least one kernel");
    }
    Ok(())
}

fn parse_sizes(spec: &str) -> Result<Vec<(usize, usize, usize)>> {
    spec.split(',')
        .map(|part| {
            let dims: Vec<usize> = part
                .trim()
                .split('x')
                .map(|d| d.parse().map_err(anyhow::Error::from))
                .collect::<Result<_>>()
                .with_context(|| format!("bad size {part:?}, expected HxWxC"))?;
            if dims.len() != 3 || dims.contains(&0) {
                bail!("bad size {part:?}, expected HxWxC with nonzero dims");
            }
            Ok((dims[0], dims[1], dims[2]))
        })
        .collect()
}
