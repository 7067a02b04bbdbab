use std::path::Path;

use anyhow::{Context, Result};

use rsod_core::eval::{evaluate, GroundTruth};

use crate::commands::{write_json_pretty, SummaryLine};
use crate::config::HarnessConfig;
use crate::dataset::load_dataset;
use crate::records::read_detections;

/// Score a detections file against the manifest's ground truth.
pub fn run(
    cfg: &HarnessConfig,
    predictions_path: &Path,
    iou_thresh: f64,
    out_dir: &Path,
) -> Result<SummaryLine> {
    let manifest = cfg
        .dataset
        .as_deref()
        .context("evaluate needs a dataset manifest (config `dataset` or RSOD_DATASET)")?;
    let image_root = cfg
        .image_root
        .clone()
        .unwrap_or_else(|| manifest.parent().unwrap_or(Path::new(".")).to_path_buf());
    let ds = load_dataset(manifest, &image_root, false)?;
    let gt: GroundTruth = ds.annotations.clone();

    let preds: Vec<_> = read_detections(predictions_path)?
        .into_iter()
        .map(|(set, _, _)| set)
        .collect();
    let report = evaluate(&preds, &gt, iou_thresh);
    write_json_pretty(&out_dir.join("eval.json"), &report)?;
    Ok(SummaryLine(format!(
        "evaluate: mAP@{:.2} = {:.4} ({} tp, {} fp, {} fn)",
        report.iou_thresh, report.map, report.tp, report.fp, report.fn_count
    )))
}
