//! The augmented-view set (mirror, scale) applied to rasters and boxes,
//! exact inverse box mappings back to the original frame, and the
//! weak/strong raster augmentations for the student path.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::BBox;
use crate::raster::Raster;

/// A geometric view of the source frame. Box mappings are exact in both
/// directions so cross-view matching can happen in one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViewTransform {
    Identity,
    MirrorHorizontal { image_width: f64 },
    Scale { factor: f64 },
}

impl ViewTransform {
    /// Short stable name used in record files.
    pub fn name(&self) -> String {
        match self {
            ViewTransform::Identity => String::from("identity"),
            ViewTransform::MirrorHorizontal { .. } => String::from("mirror"),
            ViewTransform::Scale { factor } => format!("scale_{factor}"),
        }
    }

    /// Map a box from the source frame into this view's frame.
    pub fn forward_box(&self, b: &BBox) -> BBox {
        match *self {
            ViewTransform::Identity => b.clone(),
            ViewTransform::MirrorHorizontal { image_width } => b
                .with_coords(image_width - b.x2(), b.y1(), image_width - b.x1(), b.y2())
                .expect("mirror preserves validity"),
            ViewTransform::Scale { factor } => b
                .with_coords(
                    b.x1() * factor,
                    b.y1() * factor,
                    b.x2() * factor,
                    b.y2() * factor,
                )
                .expect("positive scale preserves validity"),
        }
    }

    /// Exact inverse of [`forward_box`](Self::forward_box).
    pub fn inverse_box(&self, b: &BBox) -> BBox {
        match *self {
            ViewTransform::Identity => b.clone(),
            // mirror is an involution
            ViewTransform::MirrorHorizontal { .. } => self.forward_box(b),
            ViewTransform::Scale { factor } => {
                ViewTransform::Scale { factor: 1.0 / factor }.forward_box(b)
            }
        }
    }

    /// Apply the view to a raster. Identity passes through unchanged.
    pub fn forward_raster(&self, img: &Raster) -> Result<Raster, CoreError> {
        match *self {
            ViewTransform::Identity => Ok(img.clone()),
            ViewTransform::MirrorHorizontal { .. } => Ok(img.mirror_horizontal()),
            ViewTransform::Scale { factor } => img.scale(factor),
        }
    }
}

/// Weak/strong asymmetric augmentation parameters for the student path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPolicy {
    pub weak_flip_prob: f64,
    pub strong_flip_prob: f64,
    /// Gaussian blur sigma drawn uniformly from this range for the strong path.
    pub strong_blur_sigma: (f64, f64),
}

impl Default for AugmentationPolicy {
    fn default() -> Self {
        AugmentationPolicy {
            weak_flip_prob: 0.5,
            strong_flip_prob: 0.5,
            strong_blur_sigma: (0.5, 2.0),
        }
    }
}

impl AugmentationPolicy {
    pub fn validate(&self) -> Result<(), CoreError> {
        let ok_prob = |p: f64| (0.0..=1.0).contains(&p);
        if !ok_prob(self.weak_flip_prob) || !ok_prob(self.strong_flip_prob) {
            return Err(CoreError::InvalidConfig(String::from(
                "flip probabilities must lie in [0,1]",
            )));
        }
        if self.strong_blur_sigma.0 < 0.0 || self.strong_blur_sigma.1 < self.strong_blur_sigma.0 {
            return Err(CoreError::InvalidConfig(String::from(
                "blur sigma range must be nonnegative and ordered",
            )));
        }
        Ok(())
    }
}

/// Record of what an augmentation draw actually did, so boxes can be
/// mapped through the geometric part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppliedAugmentation {
    pub flipped: bool,
    pub blur_sigma: f64,
}

impl AppliedAugmentation {
    /// The geometric component as a view transform of the given frame.
    pub fn geometry(&self, image_width: f64) -> ViewTransform {
        if self.flipped {
            ViewTransform::MirrorHorizontal { image_width }
        } else {
            ViewTransform::Identity
        }
    }
}

fn apply(
    img: &Raster,
    flip_prob: f64,
    sigma_range: (f64, f64),
    seed: u64,
) -> (Raster, AppliedAugmentation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flipped = flip_prob > 0.0 && rng.random_bool(flip_prob.min(1.0));
    let blur_sigma = if sigma_range.1 > sigma_range.0 {
        rng.random_range(sigma_range.0..sigma_range.1)
    } else {
        sigma_range.0
    };
    let mut out = if flipped { img.mirror_horizontal() } else { img.clone() };
    if blur_sigma > 0.0 {
        out = out.gaussian_blur(blur_sigma);
    }
    (out, AppliedAugmentation { flipped, blur_sigma })
}

/// Weak augmentation: random horizontal flip only.
pub fn apply_weak(policy: &AugmentationPolicy, img: &Raster, seed: u64) -> (Raster, AppliedAugmentation) {
    apply(img, policy.weak_flip_prob, (0.0, 0.0), seed)
}

/// Strong augmentation: random flip plus random gaussian blur.
pub fn apply_strong(
    policy: &AugmentationPolicy,
    img: &Raster,
    seed: u64,
) -> (Raster, AppliedAugmentation) {
    apply(img, policy.strong_flip_prob, policy.strong_blur_sigma, seed)
}

/// Map a list of boxes through a transform.
pub fn forward_boxes(t: &ViewTransform, boxes: &[BBox]) -> Vec<BBox> {
    boxes.iter().map(|b| t.forward_box(b)).collect()
}
