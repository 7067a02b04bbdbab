//! Harness configuration: one JSON file covering the pipeline knobs, the
//! synthetic detector, the split and the simulation loop. Unknown fields
//! are rejected so typos fail loudly. Path fields (and only paths) can be
//! overridden through the environment.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use rsod_core::synthetic::NoiseModel;
use rsod_core::teacher::PipelineConfig;

use crate::dataset::SplitSpec;

pub const ENV_DATASET: &str = "RSOD_DATASET";
pub const ENV_IMAGE_ROOT: &str = "RSOD_IMAGE_ROOT";
pub const ENV_OUT: &str = "RSOD_OUT";

/// Knobs of the `simulate` command's synthetic corpus and loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub iterations: u32,
    /// Synthetic corpus size when no dataset manifest is given.
    pub num_images: u32,
    pub frame_width: u32,
    pub frame_height: u32,
    pub num_classes: u32,
    pub max_objects_per_image: u32,
    pub unlabeled_batch: usize,
    pub labeled_batch: usize,
    pub param_dim: usize,
    /// Reliability thresholds for the precision/recall sweep.
    pub sweep_thresholds: Vec<f64>,
    pub eval_iou: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            iterations: 5,
            num_images: 40,
            frame_width: 160,
            frame_height: 120,
            num_classes: 3,
            max_objects_per_image: 4,
            unlabeled_batch: 4,
            labeled_batch: 2,
            param_dim: 8,
            sweep_thresholds: vec![0.5, 0.55, 0.6, 0.65, 0.7],
            eval_iou: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarnessConfig {
    pub seed: u64,
    /// Annotation manifest path; optional because `simulate` can generate
    /// its own corpus.
    pub dataset: Option<PathBuf>,
    pub image_root: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub pipeline: PipelineConfig,
    pub noise: NoiseModel,
    pub split: SplitSpec,
    pub simulate: SimulateConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            seed: 0,
            dataset: None,
            image_root: None,
            out: None,
            pipeline: PipelineConfig::default(),
            noise: NoiseModel::default(),
            split: SplitSpec {
                labeled_fraction: 0.1,
                seed: 0,
                stratify_by_class: false,
            },
            simulate: SimulateConfig::default(),
        }
    }
}

impl HarnessConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: HarnessConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.apply_env();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Environment overrides apply to path fields only; numeric knobs come
    /// from the file or the command line.
    pub fn apply_env(&mut self) {
        if let Ok(v) = std::env::var(ENV_DATASET) {
            self.dataset = Some(PathBuf::from(v));
        }
        if let Ok(v) = std::env::var(ENV_IMAGE_ROOT) {
            self.image_root = Some(PathBuf::from(v));
        }
        if let Ok(v) = std::env::var(ENV_OUT) {
            self.out = Some(PathBuf::from(v));
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.reliability.validate()?;
        self.pipeline.mix.validate()?;
        self.pipeline.augmentation.validate()?;
        self.noise.validate()?;
        anyhow::ensure!(
            (0.0..=1.0).contains(&self.split.labeled_fraction),
            "labeled_fraction must lie in [0,1]"
        );
        anyhow::ensure!(self.simulate.num_images >= 2, "need at least two images");
        anyhow::ensure!(self.simulate.unlabeled_batch >= 1, "unlabeled_batch must be >= 1");
        anyhow::ensure!(
            self.simulate.frame_width >= 16 && self.simulate.frame_height >= 16,
            "frame must be at least 16x16"
        );
        anyhow::ensure!(self.simulate.num_classes >= 1, "need at least one class");
        anyhow::ensure!(
            (0.0..1.0).contains(&self.simulate.eval_iou),
            "eval_iou must lie in [0,1)"
        );
        Ok(())
    }

    /// Write the fully resolved configuration into the output directory so
    /// a run is reproducible from its artifacts alone.
    pub fn write_effective(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("config.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
