//! Orchestration of one teacher-student iteration over a pluggable
//! detector: teacher predictions on the original and augmented views,
//! reliability assessment, object mixing, student predictions on the
//! strong-augmented composite, loss computation and the EMA update.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::BBox;
use crate::losses::{
    self, assign, cls_loss, cprl_loss, plrw_loss, reg_loss, LossReport, PairBreakdown,
};
use crate::ompl::{mix_batch, MixConfig, MixPlan};
use crate::raster::Raster;
use crate::reliability::{assess, DetectionSet, ReliabilityConfig, ScoredPseudoLabel};
use crate::view::{apply_strong, AugmentationPolicy, ViewTransform};

/// Flat model-parameter vector; only the EMA update contract touches it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(pub Vec<f64>);

/// EMA update `theta_t <- m * theta_t + (1 - m) * theta_s`, elementwise.
pub fn ema_update(
    teacher: &ParamVector,
    student: &ParamVector,
    momentum: f64,
) -> Result<ParamVector, CoreError> {
    if teacher.0.len() != student.0.len() {
        return Err(CoreError::ParamLengthMismatch {
            teacher: teacher.0.len(),
            student: student.0.len(),
        });
    }
    if !(0.0..=1.0).contains(&momentum) {
        return Err(CoreError::InvalidConfig(String::from(
            "momentum must lie in [0,1]",
        )));
    }
    Ok(ParamVector(
        teacher
            .0
            .iter()
            .zip(&student.0)
            .map(|(t, s)| momentum * t + (1.0 - momentum) * s)
            .collect(),
    ))
}

/// One image with its raster and the oracle's ground truth. For unlabeled
/// images the boxes are the hidden truth the synthetic detector perturbs;
/// the pipeline itself never reads them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSample {
    pub image_id: u64,
    pub raster: Raster,
    pub gt: Vec<BBox>,
}

/// Behavioral contract for a detector. The engine never inspects detector
/// internals; it only requires determinism under fixed inputs.
pub trait Detector {
    fn predict(
        &self,
        sample: &ImageSample,
        view: &ViewTransform,
        params: &ParamVector,
        seed: u64,
    ) -> Result<DetectionSet, CoreError>;
}

/// All knobs of one pipeline iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub reliability: ReliabilityConfig,
    pub mix: MixConfig,
    pub augmentation: AugmentationPolicy,
    pub lambda_u: f64,
    pub assign_min_iou: f64,
    pub ema_momentum: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            reliability: ReliabilityConfig::default(),
            mix: MixConfig::default(),
            augmentation: AugmentationPolicy::default(),
            lambda_u: 1.0,
            assign_min_iou: 0.5,
            ema_momentum: 0.999,
        }
    }
}

/// Per-image record of the teacher's multi-view predictions and scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageAssessment {
    pub image_id: u64,
    pub original: DetectionSet,
    pub augmented: Vec<DetectionSet>,
    pub scored: Vec<ScoredPseudoLabel>,
}

/// Everything one iteration did, sufficient to replay its losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub seed: u64,
    pub unlabeled_ids: Vec<u64>,
    pub labeled_ids: Vec<u64>,
    pub assessments: Vec<ImageAssessment>,
    pub mix_plan: MixPlan,
    /// Pseudo-labels in the student's (strong-augmented) frame.
    pub student_pseudo_labels: Vec<ScoredPseudoLabel>,
    pub student_detections: DetectionSet,
    pub student_flipped: bool,
    /// Student predictions and ground truth on the labeled batch.
    pub labeled_predictions: Vec<DetectionSet>,
    pub labeled_gt: Vec<(u64, Vec<BBox>)>,
    pub losses: LossReport,
    pub ema_momentum: f64,
    pub teacher_params_after: ParamVector,
}

/// Derive a named substream seed from the root seed.
pub fn subseed(root: u64, domain: &str, id: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ root.rotate_left(17);
    for b in domain.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^= id;
    h.wrapping_mul(0x0000_0100_0000_01b3)
}

/// Compute the loss report from already-materialized detections. Used both
/// by [`run_iteration`] and by trace replay.
pub fn compute_losses(
    student_detections: &DetectionSet,
    student_pseudo_labels: &[ScoredPseudoLabel],
    labeled_predictions: &[DetectionSet],
    labeled_gt: &[(u64, Vec<BBox>)],
    cfg: &PipelineConfig,
) -> Result<LossReport, CoreError> {
    let pairs = assign(student_detections, student_pseudo_labels, cfg.assign_min_iou);
    let l_plrw = plrw_loss(&pairs)?;
    let cprl = cprl_loss(&pairs, cfg.reliability.gamma_hat);

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

    let mut l_sup = 0.0;
    if !labeled_predictions.is_empty() {
        for preds in labeled_predictions {
            let gt = labeled_gt
                .iter()
                .find(|(id, _)| *id == preds.image_id)
                .map(|(_, g)| g.as_slice())
                .unwrap_or(&[]);
            l_sup += losses::supervised_loss(preds, gt, cfg.assign_min_iou)?;
        }
        l_sup /= labeled_predictions.len() as f64;
    }

    losses::total_loss(
        l_sup,
        l_plrw,
        cprl.loss,
        cfg.lambda_u,
        pairs.len(),
        cprl.n_pairs,
        breakdown,
    )
}

/// Run one full pipeline iteration.
///
/// The engine computes loss values; parameter updates other than EMA are
/// the caller's business (the synthetic detector has none).
#[allow(clippy::too_many_arguments)]
pub fn run_iteration<D: Detector>(
    labeled: &[ImageSample],
    unlabeled: &[ImageSample],
    detector: &D,
    cfg: &PipelineConfig,
    teacher_params: &ParamVector,
    student_params: &ParamVector,
    seed: u64,
) -> Result<IterationTrace, CoreError> {
    cfg.reliability.validate()?;
    cfg.mix.validate()?;
    cfg.augmentation.validate()?;
    if unlabeled.is_empty() {
        return Err(CoreError::InvalidConfig(String::from(
            "unlabeled batch must not be empty",
        )));
    }

    // teacher: weak path over original + augmented views of each unlabeled image
    let mut assessments = Vec::with_capacity(unlabeled.len());
    for sample in unlabeled {
        let width = sample.raster.width() as f64;
        let transforms: Vec<ViewTransform> = cfg
            .reliability
            .views
            .iter()
            .map(|v| v.to_transform(width))
            .collect();

        let original = detector
            .predict(
                sample,
                &ViewTransform::Identity,
                teacher_params,
                subseed(seed, "teacher", sample.image_id),
            )
            .map_err(|e| wrap_detector(e, sample.image_id))?;
        let mut augmented = Vec::with_capacity(transforms.len());
        for t in &transforms {
            augmented.push(
                detector
                    .predict(sample, t, teacher_params, subseed(seed, "teacher", sample.image_id))
                    .map_err(|e| wrap_detector(e, sample.image_id))?,
            );
        }
        let scored = assess(&original, &augmented, &transforms, &cfg.reliability)?;
        assessments.push(ImageAssessment {
            image_id: sample.image_id,
            original,
            augmented,
            scored,
        });
    }

    // object mixing onto the first image of the batch
    let batch: Vec<(u64, Raster, Vec<ScoredPseudoLabel>)> = unlabeled
        .iter()
        .zip(&assessments)
        .map(|(s, a)| (s.image_id, s.raster.clone(), a.scored.clone()))
        .collect();
    let (mixed, mix_plan) = mix_batch(&batch, &cfg.mix, subseed(seed, "mix", 0))?;

    // student: strong path on the composite, pseudo-labels mapped into its frame
    let (student_raster, applied) = apply_strong(
        &cfg.augmentation,
        &mixed.raster,
        subseed(seed, "strong", unlabeled[0].image_id),
    );
    let geo = applied.geometry(mixed.raster.width() as f64);
    let student_pseudo_labels: Vec<ScoredPseudoLabel> = mixed
        .labels
        .iter()
        .map(|l| ScoredPseudoLabel {
            bbox: geo.forward_box(&l.bbox),
            reliability: l.reliability,
            per_view_evidence: l.per_view_evidence.clone(),
        })
        .collect();

    let student_sample = ImageSample {
        image_id: unlabeled[0].image_id,
        raster: student_raster,
        gt: student_pseudo_labels.iter().map(|l| l.bbox.clone()).collect(),
    };
    let student_detections = detector
        .predict(
            &student_sample,
            &ViewTransform::Identity,
            student_params,
            subseed(seed, "student", student_sample.image_id),
        )
        .map_err(|e| wrap_detector(e, student_sample.image_id))?;

    // supervised path on the labeled batch, student parameters
    let mut labeled_predictions = Vec::with_capacity(labeled.len());
    let mut labeled_gt = Vec::with_capacity(labeled.len());
    for sample in labeled {
        labeled_predictions.push(
            detector
                .predict(
                    sample,
                    &ViewTransform::Identity,
                    student_params,
                    subseed(seed, "labeled", sample.image_id),
                )
                .map_err(|e| wrap_detector(e, sample.image_id))?,
        );
        labeled_gt.push((sample.image_id, sample.gt.clone()));
    }

    let losses = compute_losses(
        &student_detections,
        &student_pseudo_labels,
        &labeled_predictions,
        &labeled_gt,
        cfg,
    )?;

    let teacher_params_after = ema_update(teacher_params, student_params, cfg.ema_momentum)?;

    Ok(IterationTrace {
        seed,
        unlabeled_ids: unlabeled.iter().map(|s| s.image_id).collect(),
        labeled_ids: labeled.iter().map(|s| s.image_id).collect(),
        assessments,
        mix_plan,
        student_pseudo_labels,
        student_detections,
        student_flipped: applied.flipped,
        labeled_predictions,
        labeled_gt,
        losses,
        ema_momentum: cfg.ema_momentum,
        teacher_params_after,
    })
}

/// Recompute the loss report from a trace's recorded detections.
pub fn replay_losses(trace: &IterationTrace, cfg: &PipelineConfig) -> Result<LossReport, CoreError> {
    compute_losses(
        &trace.student_detections,
        &trace.student_pseudo_labels,
        &trace.labeled_predictions,
        &trace.labeled_gt,
        cfg,
    )
}

fn wrap_detector(e: CoreError, image_id: u64) -> CoreError {
    match e {
        CoreError::DetectorFailure { .. } => e,
        other => CoreError::DetectorFailure {
            image_id,
            message: alloc::format!("{other}"),
        },
    }
}

/// The synthetic noisy oracle as a [`Detector`].
#[derive(Debug, Clone)]
pub struct SyntheticDetector {
    pub noise: crate::synthetic::NoiseModel,
}

impl Detector for SyntheticDetector {
    fn predict(
        &self,
        sample: &ImageSample,
        view: &ViewTransform,
        _params: &ParamVector,
        seed: u64,
    ) -> Result<DetectionSet, CoreError> {
        crate::synthetic::predict(
            sample.image_id,
            &sample.gt,
            sample.raster.width() as f64,
            sample.raster.height() as f64,
            view,
            &self.noise,
            seed,
        )
    }
}
