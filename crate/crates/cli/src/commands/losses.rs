use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};

use rsod_core::losses::{self, assign, cls_loss, cprl_loss, plrw_loss, reg_loss, PairBreakdown};
use rsod_core::view::ViewTransform;

use crate::commands::{write_json_pretty, SummaryLine};
use crate::config::HarnessConfig;
use crate::records::{read_detections, read_jsonl, ScoredRecord};

/// Compute the reliability-weighted losses from student detections and
/// scored pseudo-labels. Pairs are merged across images in image-id order
/// so the report is independent of file ordering.
pub fn run(
    cfg: &HarnessConfig,
    student_path: &Path,
    scored_path: &Path,
    out_dir: &Path,
) -> Result<SummaryLine> {
    let students = read_detections(student_path)?;
    let scored: Vec<ScoredRecord> = read_jsonl(scored_path)?;
    let scored_by_id: BTreeMap<u64, &ScoredRecord> =
        scored.iter().map(|r| (r.image_id, r)).collect();

    let mut by_id = BTreeMap::new();
    for (set, _, _) in &students {
        anyhow::ensure!(
            set.view == ViewTransform::Identity,
            "student detections must be in the identity view (image {})",
            set.image_id
        );
        anyhow::ensure!(
            by_id.insert(set.image_id, set).is_none(),
            "duplicate student record for image {}",
            set.image_id
        );
    }

    let mut pairs = Vec::new();
    for (image_id, set) in &by_id {
        let rec = scored_by_id
            .get(image_id)
            .with_context(|| format!("no scored record for image {image_id}"))?;
        pairs.extend(assign(set, &rec.labels, cfg.pipeline.assign_min_iou));
    }

    let l_plrw = plrw_loss(&pairs)?;
    let cprl = cprl_loss(&pairs, cfg.pipeline.reliability.gamma_hat);
    let mut breakdown = Vec::with_capacity(pairs.len());
    for (i, p) in pairs.iter().enumerate() {
        breakdown.push(PairBreakdown {
            reliability: p.reliability,
            cls: cls_loss(p)?,
            reg: reg_loss(p),
            cprl: cprl
                .grads
                .iter()
                .find(|g| g.pair_index == i)
                .map(|_| cprl.loss),
        });
    }
    let report = losses::total_loss(
        0.0,
        l_plrw,
        cprl.loss,
        cfg.pipeline.lambda_u,
        pairs.len(),
        cprl.n_pairs,
        breakdown,
    )?;
    // decomposition invariant of the unsupervised term
    anyhow::ensure!(
        (report.l_unsup - (report.l_plrw + report.l_cprl)).abs() <= 1e-12,
        "unsupervised loss does not decompose: {} vs {} + {}",
        report.l_unsup,
        report.l_plrw,
        report.l_cprl
    );

    write_json_pretty(&out_dir.join("losses.json"), &report)?;
    Ok(SummaryLine(format!(
        "losses: {} pairs, weighted {:.6}, consistency {:.6}, total {:.6}",
        report.n_plrw_pairs, report.l_plrw, report.l_cprl, report.l_total
    )))
}
