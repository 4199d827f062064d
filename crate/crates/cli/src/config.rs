//! Optional configuration file, TOML or JSON by extension. Every field has a
//! working default; command-line flags always win over the file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use occluseg_core::augment::AugmentRanges;
use occluseg_core::loss::DEFAULT_LAMBDA;
use occluseg_core::planner::{DEFAULT_EDGE_THRESHOLD, DEFAULT_FULLY_VISIBLE_EPS};
use occluseg_core::pq::MatchingMode;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Path to a JSON array of class names, used when an input file does not
    /// embed its catalog.
    pub catalog: Option<PathBuf>,
    pub lambda: Option<f64>,
    pub matching: Option<MatchingMode>,
    pub edge_threshold: Option<f64>,
    pub visible_eps: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub augment: AugmentConfig,
}

/// Partial augmentation ranges; unset fields fall back to the defaults for
/// the sample's canvas.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentConfig {
    pub hue_shift: Option<(f64, f64)>,
    pub saturation_scale: Option<(f64, f64)>,
    pub value_scale: Option<(f64, f64)>,
    pub blur_sigma: Option<(f64, f64)>,
    pub scale: Option<(f64, f64)>,
    pub rotation: Option<(f64, f64)>,
    pub translation_x: Option<(f64, f64)>,
    pub translation_y: Option<(f64, f64)>,
    pub shear: Option<(f64, f64)>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("failed to read config {}", path.display()))?;
        let config = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text)
                .with_context(|| format!("invalid TOML config {}", path.display()))?
        } else {
            serde_json::from_str(&text)
                .with_context(|| format!("invalid JSON config {}", path.display()))?
        };
        Ok(config)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(DEFAULT_LAMBDA)
    }

    pub fn matching(&self) -> MatchingMode {
        self.matching.unwrap_or(MatchingMode::Union)
    }

    pub fn edge_threshold(&self) -> f64 {
        self.edge_threshold.unwrap_or(DEFAULT_EDGE_THRESHOLD)
    }

    pub fn visible_eps(&self) -> f64 {
        self.visible_eps.unwrap_or(DEFAULT_FULLY_VISIBLE_EPS)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Ranges for a sample's canvas: configured intervals over the defaults.
    pub fn augment_ranges(&self, height: u32, width: u32) -> AugmentRanges {
        let mut ranges = AugmentRanges::defaults_for(height, width);
        let a = &self.augment;
        if let Some(v) = a.hue_shift {
            ranges.hue_shift = v;
        }
        if let Some(v) = a.saturation_scale {
            ranges.saturation_scale = v;
        }
        if let Some(v) = a.value_scale {
            ranges.value_scale = v;
        }
        if let Some(v) = a.blur_sigma {
            ranges.blur_sigma = v;
        }
        if let Some(v) = a.scale {
            ranges.scale = v;
        }
        if let Some(v) = a.rotation {
            ranges.rotation = v;
        }
        if let Some(v) = a.translation_x {
            ranges.translation_x = v;
        }
        if let Some(v) = a.translation_y {
            ranges.translation_y = v;
        }
        if let Some(v) = a.shear {
            ranges.shear = v;
        }
        ranges
    }
}
