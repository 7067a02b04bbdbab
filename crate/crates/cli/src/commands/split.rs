use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::commands::{write_json_pretty, SummaryLine};
use crate::config::HarnessConfig;
use crate::dataset::{load_dataset, make_split, write_split_file};

#[derive(Serialize)]
struct SplitSummary {
    total_images: usize,
    labeled: usize,
    unlabeled: usize,
    labeled_fraction: f64,
    seed: u64,
    rejected_boxes: usize,
}

pub fn run(cfg: &HarnessConfig, out_dir: &Path) -> Result<SummaryLine> {
    let manifest = cfg
        .dataset
        .as_deref()
        .context("split needs a dataset manifest (config `dataset` or RSOD_DATASET)")?;
    let image_root = cfg
        .image_root
        .clone()
        .unwrap_or_else(|| manifest.parent().unwrap_or(Path::new(".")).to_path_buf());
    let ds = load_dataset(manifest, &image_root, false)?;
    let (labeled, unlabeled) = make_split(&ds, &cfg.split)?;

    write_split_file(&out_dir.join("labeled.txt"), &labeled)?;
    write_split_file(&out_dir.join("unlabeled.txt"), &unlabeled)?;
    let summary = SplitSummary {
        total_images: ds.images.len(),
        labeled: labeled.len(),
        unlabeled: unlabeled.len(),
        labeled_fraction: cfg.split.labeled_fraction,
        seed: cfg.split.seed,
        rejected_boxes: ds.rejected_boxes,
    };
    write_json_pretty(&out_dir.join("split_summary.json"), &summary)?;
    Ok(SummaryLine(format!(
        "split: {} labeled / {} unlabeled of {} images",
        summary.labeled, summary.unlabeled, summary.total_images
    )))
}
