//! Seeded noisy-oracle detector: generates predictions from ground truth
//! under a controllable noise model, so every reliability and loss claim
//! can be validated at desk scale without a trained network.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::{clip_to_image, iou, BBox};
use crate::reliability::DetectionSet;
use crate::view::ViewTransform;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Gaussian sigma on each box coordinate, in pixels.
    pub jitter_sigma: f64,
    pub class_flip_prob: f64,
    pub miss_prob: f64,
    /// Expected false-positive count per image (Poisson).
    pub false_positive_rate: f64,
    /// Confidence model: `clamp(base - a * (1 - IoU_with_gt) + noise, 0, 1)`.
    pub confidence_base: f64,
    pub confidence_slope: f64,
    pub confidence_noise_sigma: f64,
    /// `true` models one detector viewing transformed inputs: the same
    /// per-object noise realization in every view. `false` draws noise
    /// independently per view, modeling an unstable detector.
    pub correlated: bool,
    pub num_classes: u32,
    /// False-positive box side length range, pixels.
    pub fp_size: (f64, f64),
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            jitter_sigma: 2.0,
            class_flip_prob: 0.1,
            miss_prob: 0.05,
            false_positive_rate: 1.0,
            confidence_base: 0.9,
            confidence_slope: 0.5,
            confidence_noise_sigma: 0.05,
            correlated: false,
            num_classes: 3,
            fp_size: (8.0, 30.0),
        }
    }
}

impl NoiseModel {
    /// A noise-free oracle: predictions equal the (transformed) ground
    /// truth with confidence 1.
    pub fn noise_free(num_classes: u32) -> NoiseModel {
        NoiseModel {
            jitter_sigma: 0.0,
            class_flip_prob: 0.0,
            miss_prob: 0.0,
            false_positive_rate: 0.0,
            confidence_base: 1.0,
            confidence_slope: 0.0,
            confidence_noise_sigma: 0.0,
            correlated: true,
            num_classes,
            fp_size: (8.0, 30.0),
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let ok_prob = |p: f64| (0.0..=1.0).contains(&p);
        if !ok_prob(self.class_flip_prob) || !ok_prob(self.miss_prob) {
            return Err(CoreError::InvalidConfig(String::from(
                "probabilities must lie in [0,1]",
            )));
        }
        if self.jitter_sigma < 0.0
            || self.false_positive_rate < 0.0
            || self.confidence_noise_sigma < 0.0
        {
            return Err(CoreError::InvalidConfig(String::from(
                "sigmas and rates must be nonnegative",
            )));
        }
        if self.num_classes < 2 {
            return Err(CoreError::InvalidConfig(String::from(
                "need at least 2 classes",
            )));
        }
        Ok(())
    }
}

fn view_tag(view: &ViewTransform) -> u64 {
    // FNV-1a over the stable view name
    let name = view.name();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn stream(seed: u64, object: u64, tag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&object.to_le_bytes());
    key[16..24].copy_from_slice(&tag.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Build a probability vector consistent with `(class_id, score)`:
/// `probs[class_id] = score`, remainder spread uniformly. The score is
/// floored just above `1/n` so the argmax invariant holds.
fn probs_for(score: f64, class_id: u32, num_classes: u32) -> (f64, Vec<f64>) {
    let n = num_classes as f64;
    let s = score.max(1.0 / n + 1e-9).min(1.0);
    let rest = (1.0 - s) / (n - 1.0);
    let probs = (0..num_classes)
        .map(|c| if c == class_id { s } else { rest })
        .collect();
    (s, probs)
}

/// Predict detections for one image in one view.
///
/// Ground truth is given in the original frame; the output lives in the
/// view's frame. Deterministic under `(gt, view, noise, seed)`.
pub fn predict(
    image_id: u64,
    gt: &[BBox],
    frame_w: f64,
    frame_h: f64,
    view: &ViewTransform,
    noise: &NoiseModel,
    seed: u64,
) -> Result<DetectionSet, CoreError> {
    noise.validate()?;
    let tag = if noise.correlated { 0 } else { view_tag(view) };
    let mut boxes = Vec::new();

    for (idx, g) in gt.iter().enumerate() {
        let mut rng = stream(seed, idx as u64, tag);
        if noise.miss_prob > 0.0 && rng.random_bool(noise.miss_prob) {
            continue;
        }

        // jitter in the original frame, then map into the view
        let jittered = if noise.jitter_sigma > 0.0 {
            let normal = Normal::new(0.0, noise.jitter_sigma).unwrap();
            let mut coords = [g.x1(), g.y1(), g.x2(), g.y2()];
            for c in &mut coords {
                *c += normal.sample(&mut rng);
            }
            // keep the box valid under heavy jitter
            let x1 = coords[0].min(coords[2] - 0.5);
            let y1 = coords[1].min(coords[3] - 0.5);
            match g.with_coords(x1, y1, coords[2], coords[3]) {
                Ok(b) => b,
                Err(_) => g.clone(),
            }
        } else {
            g.clone()
        };
        let Some(clipped) = clip_to_image(&jittered, frame_w, frame_h, 1.0) else {
            continue;
        };

        let class = if noise.class_flip_prob > 0.0 && rng.random_bool(noise.class_flip_prob) {
            // uniform over the other classes
            let offset = rng.random_range(1..noise.num_classes);
            (g.class_id() + offset) % noise.num_classes
        } else {
            g.class_id()
        };

        let iou_gt = iou(&clipped, g);
        let mut conf = noise.confidence_base - noise.confidence_slope * (1.0 - iou_gt);
        if noise.confidence_noise_sigma > 0.0 {
            let normal = Normal::new(0.0, noise.confidence_noise_sigma).unwrap();
            conf += normal.sample(&mut rng);
        }
        let conf = conf.clamp(0.0, 1.0);

        let (score, probs) = probs_for(conf, class, noise.num_classes);
        let in_view = view.forward_box(&clipped);
        boxes.push(BBox::with_probs(
            in_view.x1(),
            in_view.y1(),
            in_view.x2(),
            in_view.y2(),
            class,
            probs,
        )?);
        let _ = score;
    }

    // false positives: Poisson count, uniform placement, resampled until
    // clear of every gt box so label purity holds for precision metrics
    if noise.false_positive_rate > 0.0 {
        let mut rng = stream(seed, u64::MAX, tag ^ 0x9e37_79b9_7f4a_7c15);
        let count = Poisson::new(noise.false_positive_rate).unwrap().sample(&mut rng) as u64;
        for _ in 0..count {
            for _attempt in 0..100 {
                let w = rng.random_range(noise.fp_size.0..=noise.fp_size.1);
                let h = rng.random_range(noise.fp_size.0..=noise.fp_size.1);
                let x1 = rng.random_range(0.0..(frame_w - w).max(1.0));
                let y1 = rng.random_range(0.0..(frame_h - h).max(1.0));
                let Ok(cand) = BBox::new(x1, y1, x1 + w, y1 + h, 0, 0.5) else {
                    continue;
                };
                if gt.iter().any(|g| iou(&cand, g) > 0.5) {
                    continue;
                }
                let class = rng.random_range(0..noise.num_classes);
                // drawn high enough that confidence filtering alone cannot
                // separate them from true positives
                let conf = rng.random_range(0.5..1.0);
                let (_, probs) = probs_for(conf, class, noise.num_classes);
                let in_view = view.forward_box(&cand);
                boxes.push(BBox::with_probs(
                    in_view.x1(),
                    in_view.y1(),
                    in_view.x2(),
                    in_view.y2(),
                    class,
                    probs,
                )?);
                break;
            }
        }
    }

    Ok(DetectionSet {
        image_id,
        view: *view,
        boxes,
    })
}
