//! Pseudo-label quality metrics against ground truth: precision, recall,
//! per-class AP at a fixed IoU threshold and the mean over classes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{iou, BBox};
use crate::reliability::{DetectionSet, ScoredPseudoLabel};

/// Ground truth boxes keyed by image id.
pub type GroundTruth = BTreeMap<u64, Vec<BBox>>;

/// One point of the aggregate precision-recall curve, taken after each
/// prediction in confidence-descending order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub confidence: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub iou_thresh: f64,
    /// AP per class id, over classes present in the ground truth.
    pub per_class_ap: BTreeMap<u32, f64>,
    /// Arithmetic mean of the per-class APs.
    pub map: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    /// Precision at the full prediction set.
    pub precision: f64,
    /// Recall at the full prediction set.
    pub recall: f64,
    pub pr_curve: Vec<PrPoint>,
}

/// Flat prediction with a deterministic sort key.
struct Pred<'a> {
    image_id: u64,
    index: usize,
    bbox: &'a BBox,
}

fn sorted_preds<'a>(preds: &'a [DetectionSet], class: Option<u32>) -> Vec<Pred<'a>> {
    let mut flat: Vec<Pred<'a>> = preds
        .iter()
        .flat_map(|set| {
            set.boxes
                .iter()
                .enumerate()
                .filter(move |(_, b)| class.is_none_or(|c| b.class_id() == c))
                .map(move |(index, bbox)| Pred {
                    image_id: set.image_id,
                    index,
                    bbox,
                })
        })
        .collect();
    flat.sort_by(|a, b| {
        b.bbox
            .score()
            .partial_cmp(&a.bbox.score())
            .unwrap()
            .then_with(|| a.image_id.cmp(&b.image_id))
            .then_with(|| a.index.cmp(&b.index))
    });
    flat
}

/// Greedy confidence-descending matching: each prediction takes the
/// still-unmatched same-class gt box with the highest IoU at or above the
/// threshold. Returns one TP flag per sorted prediction plus the gt count.
fn match_class(
    preds: &[DetectionSet],
    gt: &GroundTruth,
    class: u32,
    iou_thresh: f64,
) -> (Vec<bool>, usize) {
    let flat = sorted_preds(preds, Some(class));
    let mut gt_used: BTreeMap<u64, Vec<bool>> = BTreeMap::new();
    let mut n_gt = 0;
    for (id, boxes) in gt {
        let mask: Vec<bool> = boxes.iter().map(|b| b.class_id() != class).collect();
        n_gt += mask.iter().filter(|&&used| !used).count();
        gt_used.insert(*id, mask);
    }

    let mut tp_flags = Vec::with_capacity(flat.len());
    for p in &flat {
        let mut best: Option<(usize, f64)> = None;
        if let (Some(boxes), Some(used)) = (gt.get(&p.image_id), gt_used.get(&p.image_id)) {
            for (gi, g) in boxes.iter().enumerate() {
                if used[gi] || g.class_id() != class {
                    continue;
                }
                let v = iou(p.bbox, g);
                if v >= iou_thresh && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((gi, v));
                }
            }
        }
        match best {
            Some((gi, _)) => {
                gt_used.get_mut(&p.image_id).unwrap()[gi] = true;
                tp_flags.push(true);
            }
            None => tp_flags.push(false),
        }
    }
    (tp_flags, n_gt)
}

/// All-points interpolated AP from a confidence-ordered TP flag sequence.
fn average_precision(tp_flags: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(tp_flags.len());
    let mut tp = 0usize;
    for (i, &flag) in tp_flags.iter().enumerate() {
        if flag {
            tp += 1;
        }
        points.push((tp as f64 / n_gt as f64, tp as f64 / (i + 1) as f64));
    }
    // precision envelope: max precision at any recall >= r
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for i in 0..points.len() {
        let (r, _) = points[i];
        if r > prev_recall {
            let p_max = points[i..]
                .iter()
                .map(|&(_, p)| p)
                .fold(0.0f64, f64::max);
            ap += (r - prev_recall) * p_max;
            prev_recall = r;
        }
    }
    ap
}

/// Evaluate detections (or pseudo-labels) against ground truth at one IoU
/// threshold.
pub fn evaluate(preds: &[DetectionSet], gt: &GroundTruth, iou_thresh: f64) -> EvalReport {
    let mut classes: Vec<u32> = gt
        .values()
        .flat_map(|boxes| boxes.iter().map(|b| b.class_id()))
        .collect();
    classes.sort_unstable();
    classes.dedup();

    let mut per_class_ap = BTreeMap::new();
    let mut tp = 0;
    let mut fp = 0;
    let mut n_gt_total = 0;
    for &class in &classes {
        let (flags, n_gt) = match_class(preds, gt, class, iou_thresh);
        per_class_ap.insert(class, average_precision(&flags, n_gt));
        tp += flags.iter().filter(|&&f| f).count();
        fp += flags.iter().filter(|&&f| !f).count();
        n_gt_total += n_gt;
    }
    // predictions of classes absent from gt are plain false positives
    let known: Vec<u32> = classes.clone();
    for set in preds {
        for b in &set.boxes {
            if !known.contains(&b.class_id()) {
                fp += 1;
            }
        }
    }

    let map = if per_class_ap.is_empty() {
        0.0
    } else {
        per_class_ap.values().sum::<f64>() / per_class_ap.len() as f64
    };
    let n_preds = tp + fp;
    let precision = if n_preds == 0 { 1.0 } else { tp as f64 / n_preds as f64 };
    let recall = if n_gt_total == 0 { 0.0 } else { tp as f64 / n_gt_total as f64 };

    // aggregate curve across classes, confidence-descending
    let mut pr_curve = Vec::new();
    {
        let flat = sorted_preds(preds, None);
        // reuse the per-class matching so curve TP flags agree with counts
        let mut flags_by_key: BTreeMap<(u64, usize), bool> = BTreeMap::new();
        for &class in &classes {
            let class_flat = sorted_preds(preds, Some(class));
            let (flags, _) = match_class(preds, gt, class, iou_thresh);
            for (p, f) in class_flat.iter().zip(flags) {
                flags_by_key.insert((p.image_id, p.index), f);
            }
        }
        let mut ctp = 0usize;
        for (i, p) in flat.iter().enumerate() {
            if flags_by_key
                .get(&(p.image_id, p.index))
                .copied()
                .unwrap_or(false)
            {
                ctp += 1;
            }
            pr_curve.push(PrPoint {
                confidence: p.bbox.score(),
                precision: ctp as f64 / (i + 1) as f64,
                recall: if n_gt_total == 0 {
                    0.0
                } else {
                    ctp as f64 / n_gt_total as f64
                },
            });
        }
    }

    EvalReport {
        iou_thresh,
        per_class_ap,
        map,
        tp,
        fp,
        fn_count: n_gt_total - tp,
        precision,
        recall,
        pr_curve,
    }
}

/// One row of a reliability-threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma_hat: f64,
    pub kept: usize,
    /// Precision of the filtered set; 1.0 by convention when empty.
    pub precision: f64,
    pub recall: f64,
}

/// Precision/recall of the reliability-filtered pseudo-label set at each
/// threshold. The empty-set precision convention (1.0) is documented in
/// the emitted table header.
pub fn reliability_sweep(
    labels: &BTreeMap<u64, Vec<ScoredPseudoLabel>>,
    gt: &GroundTruth,
    thresholds: &[f64],
    iou_thresh: f64,
) -> Vec<SweepRow> {
    use crate::view::ViewTransform;
    thresholds
        .iter()
        .map(|&gamma| {
            let mut kept = 0;
            let sets: Vec<DetectionSet> = labels
                .iter()
                .map(|(&image_id, ls)| DetectionSet {
                    image_id,
                    view: ViewTransform::Identity,
                    boxes: ls
                        .iter()
                        .filter(|l| l.reliability > gamma)
                        .map(|l| l.bbox.clone())
                        .collect(),
                })
                .collect();
            kept += sets.iter().map(|s| s.boxes.len()).sum::<usize>();
            let report = evaluate(&sets, gt, iou_thresh);
            SweepRow {
                gamma_hat: gamma,
                kept,
                precision: if kept == 0 { 1.0 } else { report.precision },
                recall: report.recall,
            }
        })
        .collect()
}
