//! `occluseg` — occlusion-aware segmentation toolkit.
//!
//! One binary, subcommand per tool: dataset generation from video
//! annotations, image/label augmentation, mPQ evaluation, pick-order
//! planning, and the loss-kernel gradient check. Machine-readable JSON goes
//! to stdout (or `--out`); diagnostics and tables go to stderr. Every
//! subcommand is deterministic given its inputs, config, and seed.

mod commands;
mod config;
mod io;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use occluseg_core::pq::MatchingMode;

use crate::config::Config;

#[derive(Parser)]
#[command(name = "occluseg", version, about = "Occlusion-aware segmentation toolkit")]
struct Cli {
    /// Optional TOML or JSON config file; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for per-frame and per-sample work.
    #[arg(long, global = true, env = "OCCLUSEG_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum MatchingArg {
    Union,
    Visible,
}

impl From<MatchingArg> for MatchingMode {
    fn from(value: MatchingArg) -> Self {
        match value {
            MatchingArg::Union => MatchingMode::Union,
            MatchingArg::Visible => MatchingMode::Visible,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate per-frame label files from a video annotation dataset.
    DatasetBuild {
        /// Dataset JSON (classes, canvas size, videos).
        dataset: PathBuf,
        /// Output directory for the per-frame label files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Augment image/label samples; pass --image/--labels in pairs.
    Augment {
        #[arg(long = "image", required = true)]
        images: Vec<PathBuf>,
        #[arg(long = "labels", required = true)]
        labels: Vec<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Base RNG seed; sample i draws its parameters from seed + i.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate predictions against ground truth and report per-class PQ
    /// and mPQ under both matching regions.
    Eval {
        predictions: PathBuf,
        ground_truth: PathBuf,
        /// Region the headline matching runs on.
        #[arg(long, value_enum)]
        matching: Option<MatchingArg>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan a pick order from frame labels or predictions.
    Plan {
        labels: PathBuf,
        /// Plan removals to reach this instance.
        #[arg(long, conflicts_with = "random")]
        target: Option<u32>,
        /// Select the next instance for random picking.
        #[arg(long)]
        random: bool,
        /// Minimum covered fraction of an occluded region for a graph edge.
        #[arg(long)]
        edge_threshold: Option<f64>,
        /// Occluded-ratio ceiling for "fully visible".
        #[arg(long)]
        visible_eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every loss kernel's analytic gradient against central finite
    /// differences and print the lambda sweep of joint totals.
    Losscheck {
        #[arg(long)]
        seed: Option<u64>,
        /// Tensor sizes to cycle through, e.g. "4x4x3,3x5x5".
        #[arg(long)]
        sizes: Option<String>,
        /// Extra balancing weight to include in the sweep.
        #[arg(long)]
        lambda: Option<f64>,
        /// Negative control: flip analytic gradient signs; the run must fail.
        #[arg(long, hide = true)]
        inject_wrong_sign: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("failed to configure worker pool")?;
    }
    let config = Config::load(cli.config.as_deref())?;

    match cli.command {
        Command::DatasetBuild { dataset, out } => commands::dataset_build(&dataset, &out),
        Command::Augment {
            images,
            labels,
            out,
            seed,
        } => commands::augment(&images, &labels, &out, seed, &config),
        Command::Eval {
            predictions,
            ground_truth,
            matching,
            out,
        } => commands::eval(
            &predictions,
            &ground_truth,
            matching.map(MatchingMode::from),
            out.as_deref(),
            &config,
        ),
        Command::Plan {
            labels,
            target,
            random,
            edge_threshold,
            visible_eps,
            out,
        } => commands::plan(
            &labels,
            target,
            random,
            edge_threshold,
            visible_eps,
            out.as_deref(),
            &config,
        ),
        Command::Losscheck {
            seed,
            sizes,
            lambda,
            inject_wrong_sign,
            out,
        } => commands::losscheck(
            seed,
            sizes.as_deref(),
            lambda,
            inject_wrong_sign,
            out.as_deref(),
            &config,
        ),
    }
}
