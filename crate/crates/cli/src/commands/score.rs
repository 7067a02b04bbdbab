use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

use rsod_core::reliability::{assess, DetectionSet};
use rsod_core::view::ViewTransform;

use crate::commands::SummaryLine;
use crate::config::HarnessConfig;
use crate::records::{read_detections, write_jsonl, ScoredRecord};

/// Score pseudo-labels from per-view teacher detections. All detection
/// files are pooled; each image must supply an identity record plus one
/// record per configured augmented view.
pub fn run(cfg: &HarnessConfig, detection_files: &[&Path], out_dir: &Path) -> Result<SummaryLine> {
    if detection_files.is_empty() {
        bail!("score needs at least one detections file");
    }
    // image_id -> view name -> (set, width, height)
    let mut by_image: BTreeMap<u64, BTreeMap<String, (DetectionSet, f64, f64)>> = BTreeMap::new();
    for path in detection_files {
        for (set, w, h) in read_detections(path)? {
            let name = set.view.name().to_string();
            let image_id = set.image_id;
            if by_image
                .entry(image_id)
                .or_default()
                .insert(name.clone(), (set, w, h))
                .is_some()
            {
                bail!("duplicate view {name:?} for image {image_id}");
            }
        }
    }

    let rel = &cfg.pipeline.reliability;
    let mut records = Vec::new();
    let mut n_boxes = 0usize;
    for (image_id, views) in &by_image {
        let (original, width, height) = views
            .get("identity")
            .with_context(|| format!("image {image_id} missing view \"identity\""))?
            .clone();
        let transforms: Vec<ViewTransform> =
            rel.views.iter().map(|v| v.to_transform(width)).collect();
        let mut augmented = Vec::with_capacity(transforms.len());
        for t in &transforms {
            let (set, _, _) = views
                .get(t.name().as_str())
                .with_context(|| format!("image {image_id} missing view {:?}", t.name()))?;
            augmented.push(set.clone());
        }
        let scored = assess(&original, &augmented, &transforms, rel)?;
        n_boxes += scored.len();
        records.push(ScoredRecord {
            image_id: *image_id,
            width,
            height,
            labels: scored,
        });
    }

    let out = out_dir.join("scored.jsonl");
    write_jsonl(&out, &records)?;
    Ok(SummaryLine(format!(
        "score: {} boxes over {} images -> {}",
        n_boxes,
        records.len(),
        out.display()
    )))
}
