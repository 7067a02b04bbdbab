//! Pseudo-label reliability assessment: cross-view matching, the class
//! consistency flag, the sigmoid reliability score and threshold
//! filtering.
//!
//! Detections from each augmented view are inverse-mapped into the
//! original frame before matching, so all IoU comparisons happen in one
//! coordinate system.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::{iou, BBox};
use crate::math::sigmoid;
use crate::view::ViewTransform;

/// All boxes a detector predicts for one image in one view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSet {
    pub image_id: u64,
    pub view: ViewTransform,
    pub boxes: Vec<BBox>,
}

/// Configuration-level description of an augmented view, materialized into
/// a [`ViewTransform`] once the frame width is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AugViewSpec {
    Mirror,
    Scale { factor: f64 },
}

impl AugViewSpec {
    pub fn to_transform(self, image_width: f64) -> ViewTransform {
        match self {
            AugViewSpec::Mirror => ViewTransform::MirrorHorizontal { image_width },
            AugViewSpec::Scale { factor } => ViewTransform::Scale { factor },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityConfig {
    /// Reliability scaling factor H.
    pub h: f64,
    /// Reliability score threshold.
    pub gamma_hat: f64,
    /// The set of augmented views.
    pub views: Vec<AugViewSpec>,
    /// Minimal IoU for a cross-view match to count; at or below it the
    /// view contributes nothing.
    pub match_min_iou: f64,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        ReliabilityConfig {
            h: 0.6,
            gamma_hat: 0.5,
            views: alloc::vec![AugViewSpec::Mirror, AugViewSpec::Scale { factor: 0.75 }],
            match_min_iou: 0.0,
        }
    }
}

impl ReliabilityConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.h <= 0.0 {
            return Err(CoreError::InvalidConfig(String::from("H must be positive")));
        }
        if !(0.0..1.0).contains(&self.gamma_hat) {
            return Err(CoreError::InvalidConfig(String::from(
                "gamma_hat must lie in [0,1)",
            )));
        }
        if self.views.is_empty() {
            return Err(CoreError::InvalidConfig(String::from(
                "at least one augmented view required",
            )));
        }
        Ok(())
    }
}

/// Match evidence collected in one augmented view for one original box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewEvidence {
    /// Best-matching augmented box, mapped back to the original frame.
    pub matched: Option<BBox>,
    pub iou_star: f64,
    /// |s^o - s^a|; 0 for unmatched views.
    pub score_gap: f64,
    /// Class consistency flag.
    pub beta: u8,
}

/// A pseudo-box plus its reliability score and per-view match evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPseudoLabel {
    pub bbox: BBox,
    pub reliability: f64,
    pub per_view_evidence: Vec<ViewEvidence>,
}

/// Highest-IoU candidate for `target`; candidates must already live in the
/// original frame. Ties break by higher confidence, then lower index.
pub fn best_match<'a>(
    target: &BBox,
    candidates: &'a [BBox],
    match_min_iou: f64,
) -> (Option<&'a BBox>, f64) {
    let mut best: Option<(&BBox, f64)> = None;
    for cand in candidates {
        let v = iou(target, cand);
        let better = match best {
            None => true,
            Some((b, bv)) => v > bv || (v == bv && cand.score() > b.score()),
        };
        if better {
            best = Some((cand, v));
        }
    }
    match best {
        Some((b, v)) if v > match_min_iou => (Some(b), v),
        _ => (None, 0.0),
    }
}

/// Class consistency flag: 1 iff the classes agree.
pub fn beta(c_o: u32, c_a: u32) -> u8 {
    u8::from(c_o == c_a)
}

/// Reliability score over the per-view evidence.
///
/// `R = sigmoid((1/H) * mean_a[IoU*_a * (1 - |s^o - s^a|) * beta_a])`,
/// with unmatched views contributing zero.
pub fn reliability_score(
    original: &BBox,
    per_view_matches: &[(Option<&BBox>, f64)],
    cfg: &ReliabilityConfig,
) -> Result<f64, CoreError> {
    if cfg.h <= 0.0 {
        return Err(CoreError::InvalidConfig(String::from("H must be positive")));
    }
    let n_a = per_view_matches.len() as f64;
    let mut sum = 0.0;
    for (matched, iou_star) in per_view_matches {
        if let Some(m) = matched {
            let gap = (original.score() - m.score()).abs();
            let b = beta(original.class_id(), m.class_id()) as f64;
            sum += iou_star * (1.0 - gap) * b;
        }
    }
    Ok(sigmoid(sum / n_a / cfg.h))
}

/// Score every original-view box against the augmented views.
///
/// `augmented[i]` must hold the detections produced in `transforms[i]`'s
/// frame; they are inverse-mapped here before matching.
pub fn assess(
    original: &DetectionSet,
    augmented: &[DetectionSet],
    transforms: &[ViewTransform],
    cfg: &ReliabilityConfig,
) -> Result<Vec<ScoredPseudoLabel>, CoreError> {
    cfg.validate()?;
    if augmented.len() != transforms.len() || augmented.len() != cfg.views.len() {
        return Err(CoreError::ViewCountMismatch {
            expected: cfg.views.len(),
            got: augmented.len(),
        });
    }

    // inverse-map every augmented view into the original frame once
    let mapped: Vec<Vec<BBox>> = augmented
        .iter()
        .zip(transforms)
        .map(|(set, t)| set.boxes.iter().map(|b| t.inverse_box(b)).collect())
        .collect();

    let mut out = Vec::with_capacity(original.boxes.len());
    for orig in &original.boxes {
        let mut evidence = Vec::with_capacity(mapped.len());
        let mut matches = Vec::with_capacity(mapped.len());
        for cands in &mapped {
            let (m, iou_star) = best_match(orig, cands, cfg.match_min_iou);
            evidence.push(ViewEvidence {
                matched: m.cloned(),
                iou_star,
                score_gap: m.map_or(0.0, |mb| (orig.score() - mb.score()).abs()),
                beta: m.map_or(0, |mb| beta(orig.class_id(), mb.class_id())),
            });
            matches.push((m, iou_star));
        }
        let reliability = reliability_score(orig, &matches, cfg)?;
        debug_assert!((0.5..=sigmoid(1.0 / cfg.h)).contains(&reliability));
        out.push(ScoredPseudoLabel {
            bbox: orig.clone(),
            reliability,
            per_view_evidence: evidence,
        });
    }
    Ok(out)
}

/// Keep labels with reliability strictly above `gamma_hat`, order preserved.
pub fn filter_reliable(labels: &[ScoredPseudoLabel], gamma_hat: f64) -> Vec<ScoredPseudoLabel> {
    labels
        .iter()
        .filter(|l| l.reliability > gamma_hat)
        .cloned()
        .collect()
}
