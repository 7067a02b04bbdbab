//! Loss values and analytic gradients: supervised classification +
//! regression, reliability-weighted unsupervised loss, corner-point
//! regression loss and their combination.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::{diag_sq, enclosing_rect, iou, BBox};
use crate::math;
use crate::reliability::{DetectionSet, ScoredPseudoLabel};

const PROB_FLOOR: f64 = 1e-12;

/// A student prediction paired with the teacher pseudo-label supervising it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub student: BBox,
    pub teacher: BBox,
    /// Reliability of the teacher pseudo-label; 1 for ground truth.
    pub reliability: f64,
    pub match_iou: f64,
}

/// Per-pair contribution recorded in a [`LossReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBreakdown {
    pub reliability: f64,
    pub cls: f64,
    pub reg: f64,
    pub cprl: Option<f64>,
}

/// All loss values of one step, with the counts behind each normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub l_sup: f64,
    pub l_plrw: f64,
    pub l_cprl: f64,
    pub l_unsup: f64,
    pub l_total: f64,
    pub lambda_u: f64,
    pub n_plrw_pairs: usize,
    pub n_cprl_pairs: usize,
    pub pairs: Vec<PairBreakdown>,
}

/// Greedy one-to-one matching of student boxes to pseudo-labels by
/// descending IoU; pairs below `assign_min_iou` are dropped. Ties break by
/// higher student confidence, then lower (student, teacher) index.
pub fn assign(
    student: &DetectionSet,
    pseudo: &[ScoredPseudoLabel],
    assign_min_iou: f64,
) -> Vec<MatchedPair> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (si, s) in student.boxes.iter().enumerate() {
        for (ti, t) in pseudo.iter().enumerate() {
            let v = iou(s, &t.bbox);
            if v >= assign_min_iou && v > 0.0 {
                edges.push((si, ti, v));
            }
        }
    }
    edges.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap()
            .then_with(|| {
                let (sa, sb) = (student.boxes[a.0].score(), student.boxes[b.0].score());
                sb.partial_cmp(&sa).unwrap()
            })
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });

    let mut used_s = alloc::vec![false; student.boxes.len()];
    let mut used_t = alloc::vec![false; pseudo.len()];
    let mut pairs = Vec::new();
    for (si, ti, v) in edges {
        if used_s[si] || used_t[ti] {
            continue;
        }
        used_s[si] = true;
        used_t[ti] = true;
        pairs.push(MatchedPair {
            student: student.boxes[si].clone(),
            teacher: pseudo[ti].bbox.clone(),
            reliability: pseudo[ti].reliability,
            match_iou: v,
        });
    }
    pairs
}

/// Cross-entropy of the student's class probabilities against the teacher
/// class, clamped at a probability floor.
pub fn cls_loss(pair: &MatchedPair) -> Result<f64, CoreError> {
    let probs = pair.student.probs().ok_or(CoreError::MissingProbs)?;
    let p = probs
        .get(pair.teacher.class_id() as usize)
        .copied()
        .unwrap_or(0.0)
        .max(PROB_FLOOR);
    Ok(-math::ln(p))
}

fn smooth_l1(x: f64) -> f64 {
    if x.abs() < 1.0 {
        0.5 * x * x
    } else {
        x.abs() - 0.5
    }
}

/// Smooth-L1 over the standard box deltas
/// `(dcx/w_t, dcy/h_t, log(w_s/w_t), log(h_s/h_t))`, summed over components.
pub fn reg_loss(pair: &MatchedPair) -> f64 {
    let (scx, scy) = pair.student.center();
    let (tcx, tcy) = pair.teacher.center();
    let wt = pair.teacher.width();
    let ht = pair.teacher.height();
    let deltas = [
        (scx - tcx) / wt,
        (scy - tcy) / ht,
        math::ln(pair.student.width() / wt),
        math::ln(pair.student.height() / ht),
    ];
    deltas.iter().copied().map(smooth_l1).sum()
}

/// Reliability-weighted unsupervised loss:
/// `(1/N) * sum_j R_j * (l_cls + l_reg)`; 0 when there are no pairs.
pub fn plrw_loss(pairs: &[MatchedPair]) -> Result<f64, CoreError> {
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for p in pairs {
        sum += p.reliability * (cls_loss(p)? + reg_loss(p));
    }
    Ok(sum / pairs.len() as f64)
}

/// Gradient of the corner-regression loss with respect to one pair's
/// student box, expressed over the four distinct corner coordinates
/// `(x1, y1, x2, y2)` (each appears in two rows of the corner matrix).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CprlPairGrad {
    /// Index into the input pair list.
    pub pair_index: usize,
    pub d_student: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CprlResult {
    pub loss: f64,
    pub grads: Vec<CprlPairGrad>,
    pub n_pairs: usize,
}

fn cprl_pair(teacher: &BBox, student: &BBox) -> (f64, [f64; 4]) {
    let (tx1, ty1, tx2, ty2) = (teacher.x1(), teacher.y1(), teacher.x2(), teacher.y2());
    let (sx1, sy1, sx2, sy2) = (student.x1(), student.y1(), student.x2(), student.y2());

    // squared Frobenius norm of the corner difference matrix; each box
    // coordinate appears in two corners
    let sq = |v: f64| v * v;
    let n = 2.0 * (sq(tx1 - sx1) + sq(tx2 - sx2) + sq(ty1 - sy1) + sq(ty2 - sy2));

    let enc = enclosing_rect(teacher, student);
    let l2 = diag_sq(&enc);
    let w = enc.width();
    let h = enc.height();

    let loss = n / l2;

    // dN/d(sx1, sy1, sx2, sy2)
    let dn = [
        4.0 * (sx1 - tx1),
        4.0 * (sy1 - ty1),
        4.0 * (sx2 - tx2),
        4.0 * (sy2 - ty2),
    ];
    // dl2/dp is active only where the student attains the enclosing extremum
    let dl2 = [
        if sx1 < tx1 { -2.0 * w } else { 0.0 },
        if sy1 < ty1 { -2.0 * h } else { 0.0 },
        if sx2 > tx2 { 2.0 * w } else { 0.0 },
        if sy2 > ty2 { 2.0 * h } else { 0.0 },
    ];
    let mut grad = [0.0; 4];
    for c in 0..4 {
        grad[c] = dn[c] / l2 - n / (l2 * l2) * dl2[c];
    }
    (loss, grad)
}

/// Corner-point regression loss over pairs whose reliability strictly
/// exceeds `gamma_hat`:
/// `(1/N) * sum_j ||C^T_j - C^S_j||_F^2 / l_j^2`, with `l_j^2` the squared
/// diagonal of the pair's minimum enclosing rectangle. Analytic gradients
/// include the dependence of `l_j` on the student box.
pub fn cprl_loss(pairs: &[MatchedPair], gamma_hat: f64) -> CprlResult {
    let qualifying: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.reliability > gamma_hat)
        .map(|(i, _)| i)
        .collect();
    if qualifying.is_empty() {
        return CprlResult {
            loss: 0.0,
            grads: Vec::new(),
            n_pairs: 0,
        };
    }
    let n = qualifying.len() as f64;
    let mut loss = 0.0;
    let mut grads = Vec::with_capacity(qualifying.len());
    for &i in &qualifying {
        let (l, g) = cprl_pair(&pairs[i].teacher, &pairs[i].student);
        loss += l;
        grads.push(CprlPairGrad {
            pair_index: i,
            d_student: [g[0] / n, g[1] / n, g[2] / n, g[3] / n],
        });
    }
    CprlResult {
        loss: loss / n,
        grads,
        n_pairs: qualifying.len(),
    }
}

/// Supervised loss: assign predictions to ground truth, then mean of
/// unweighted `l_cls + l_reg` over matched pairs.
pub fn supervised_loss(
    preds: &DetectionSet,
    gt: &[BBox],
    assign_min_iou: f64,
) -> Result<f64, CoreError> {
    let as_labels: Vec<ScoredPseudoLabel> = gt
        .iter()
        .map(|b| ScoredPseudoLabel {
            bbox: b.clone(),
            reliability: 1.0,
            per_view_evidence: Vec::new(),
        })
        .collect();
    let pairs = assign(preds, &as_labels, assign_min_iou);
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for p in &pairs {
        sum += cls_loss(p)? + reg_loss(p);
    }
    Ok(sum / pairs.len() as f64)
}

/// Combine the pieces: `L_unsup = L_PLRW + L_CPRL`,
/// `L_total = L_sup + lambda_u * L_unsup`.
pub fn total_loss(
    l_sup: f64,
    l_plrw: f64,
    l_cprl: f64,
    lambda_u: f64,
    n_plrw_pairs: usize,
    n_cprl_pairs: usize,
    pairs: Vec<PairBreakdown>,
) -> Result<LossReport, CoreError> {
    if lambda_u < 0.0 {
        return Err(CoreError::InvalidConfig(alloc::string::String::from(
            "lambda_u must be nonnegative",
        )));
    }
    let l_unsup = l_plrw + l_cprl;
    Ok(LossReport {
        l_sup,
        l_plrw,
        l_cprl,
        l_unsup,
        l_total: l_sup + lambda_u * l_unsup,
        lambda_u,
        n_plrw_pairs,
        n_cprl_pairs,
        pairs,
    })
}
