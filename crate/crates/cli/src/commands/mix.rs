use std::path::Path;

use anyhow::{Context, Result};

use rsod_core::ompl::mix_batch;
use rsod_core::raster::Raster;
use rsod_core::reliability::ScoredPseudoLabel;

use crate::commands::{write_json_pretty, SummaryLine};
use crate::config::HarnessConfig;
use crate::pngio::{read_raster, write_png};
use crate::records::{read_jsonl, write_jsonl, ScoredRecord};

/// Build one mixed composite from a scored batch. Rasters are looked up in
/// the image directory as `{image_id}.png` (or `.pgm`).
pub fn run(
    cfg: &HarnessConfig,
    scored_path: &Path,
    image_dir: &Path,
    seed: u64,
    out_dir: &Path,
) -> Result<SummaryLine> {
    let records: Vec<ScoredRecord> = read_jsonl(scored_path)?;
    anyhow::ensure!(!records.is_empty(), "scored file has no records");

    let mut batch: Vec<(u64, Raster, Vec<ScoredPseudoLabel>)> = Vec::new();
    for r in &records {
        let raster = load_image(image_dir, r.image_id)
            .with_context(|| format!("loading raster for image {}", r.image_id))?;
        batch.push((r.image_id, raster, r.labels.clone()));
    }

    let (mixed, plan) = mix_batch(&batch, &cfg.pipeline.mix, seed)?;
    let png_path = out_dir.join(format!("mixed_{}.png", plan.target_image_id));
    write_png(&png_path, &mixed.raster)?;
    write_json_pretty(&out_dir.join("mix_plan.json"), &plan)?;
    let labels = ScoredRecord {
        image_id: plan.target_image_id,
        width: mixed.raster.width() as f64,
        height: mixed.raster.height() as f64,
        labels: mixed.labels.clone(),
    };
    write_jsonl(&out_dir.join("mixed_labels.jsonl"), &[labels])?;

    Ok(SummaryLine(format!(
        "mix: target {} with {} accepted / {} rejected pastes -> {}",
        plan.target_image_id,
        plan.accepted(),
        plan.rejected(),
        png_path.display()
    )))
}

fn load_image(dir: &Path, image_id: u64) -> Result<Raster> {
    for ext in ["png", "pgm"] {
        let p = dir.join(format!("{image_id}.{ext}"));
        if p.exists() {
            return read_raster(&p);
        }
    }
    anyhow::bail!("no {image_id}.png or {image_id}.pgm under {}", dir.display())
}
