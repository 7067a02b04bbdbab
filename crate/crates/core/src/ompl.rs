//! Object-mixed pseudo-labels: rotate/scale high-reliability object chips
//! from images 2..K of a batch and paste them into image 1 under an IoU
//! overlap gate, emitting the composite raster and its merged label set.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::{iou, BBox};
use crate::math;
use crate::raster::{Chip, Raster};
use crate::reliability::{filter_reliable, ScoredPseudoLabel};

/// Where a chip lands when its source position is gated out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Keep the source box center, reject on gate failure.
    SourcePosition,
    /// Keep the source center, then try up to 10 seeded uniform placements.
    RandomRetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixConfig {
    /// IoU overlap threshold for the paste gate.
    pub delta: f64,
    /// Chip rotation range in degrees, symmetric about zero.
    pub rotation_deg: f64,
    /// Chip scale range.
    pub scale_range: (f64, f64),
    /// Reliability threshold shared with the assessment stage.
    pub gamma_hat: f64,
    /// Cap on accepted pastes per composite; `None` = unlimited.
    pub max_pastes_per_image: Option<usize>,
    pub placement: Placement,
    pub seed: u64,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig {
            delta: 0.2,
            rotation_deg: 30.0,
            scale_range: (0.8, 1.25),
            gamma_hat: 0.5,
            max_pastes_per_image: None,
            placement: Placement::SourcePosition,
            seed: 0,
        }
    }
}

impl MixConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(CoreError::InvalidConfig(String::from("delta must lie in [0,1]")));
        }
        if self.scale_range.0 <= 0.0 || self.scale_range.1 < self.scale_range.0 {
            return Err(CoreError::InvalidConfig(String::from(
                "scale range must be positive and ordered",
            )));
        }
        Ok(())
    }
}

/// One attempted paste, accepted or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PasteRecord {
    pub source_image_id: u64,
    pub source_box: BBox,
    pub rotation_deg: f64,
    pub scale: f64,
    /// Where the chip would land (present even for rejections when a
    /// placement was computable).
    pub destination: Option<BBox>,
    /// Integer pixel rectangle actually written, for audit of pixel locality.
    pub pixel_rect: Option<(i64, i64, u32, u32)>,
    pub accepted: bool,
}

/// Full record of one mixing pass over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixPlan {
    pub target_image_id: u64,
    pub pastes: Vec<PasteRecord>,
}

impl MixPlan {
    pub fn accepted(&self) -> usize {
        self.pastes.iter().filter(|p| p.accepted).count()
    }
    pub fn rejected(&self) -> usize {
        self.pastes.len() - self.accepted()
    }
}

/// Composite raster plus the merged label set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedImage {
    pub raster: Raster,
    pub labels: Vec<ScoredPseudoLabel>,
}

/// Crop the object chip at `b`, scale and rotate it about its center.
///
/// Returns the chip (with alpha footprint) and the axis-aligned bounding
/// box of the transformed chip, centered where the source box was.
pub fn augment_chip(
    img: &Raster,
    b: &BBox,
    rotation_deg: f64,
    scale: f64,
) -> Result<(Chip, BBox), CoreError> {
    let x0 = math::floor(b.x1().max(0.0)) as u32;
    let y0 = math::floor(b.y1().max(0.0)) as u32;
    let x1 = (libm::ceil(b.x2()) as u32).min(img.width());
    let y1 = (libm::ceil(b.y2()) as u32).min(img.height());
    if x1 <= x0 || y1 <= y0 {
        return Err(CoreError::DegenerateChip);
    }
    let crop = img.crop(x0, y0, x1 - x0, y1 - y0)?;

    let scaled = crop.scale(scale)?;

    let theta = rotation_deg.to_radians();
    let (sin_t, cos_t) = (math::sin(theta), math::cos(theta));

    // continuous footprint of the transformed source box
    let w_s = b.width() * scale;
    let h_s = b.height() * scale;
    let out_w = w_s * cos_t.abs() + h_s * sin_t.abs();
    let out_h = w_s * sin_t.abs() + h_s * cos_t.abs();
    if out_w < 1.0 || out_h < 1.0 {
        return Err(CoreError::DegenerateChip);
    }
    let (cx, cy) = b.center();
    let new_box = b.with_coords(cx - out_w / 2.0, cy - out_h / 2.0, cx + out_w / 2.0, cy + out_h / 2.0)?;

    if rotation_deg == 0.0 {
        return Ok((Chip::opaque(scaled), new_box));
    }

    // raster footprint of the rotated chip
    let sw = scaled.width() as f64;
    let sh = scaled.height() as f64;
    let rw = (math::round(sw * cos_t.abs() + sh * sin_t.abs()) as u32).max(1);
    let rh = (math::round(sw * sin_t.abs() + sh * cos_t.abs()) as u32).max(1);

    let mut data = Vec::with_capacity((rw as usize) * (rh as usize));
    let mut alpha = Vec::with_capacity((rw as usize) * (rh as usize));
    let (ocx, ocy) = (rw as f64 / 2.0 - 0.5, rh as f64 / 2.0 - 0.5);
    let (scx, scy) = (sw / 2.0 - 0.5, sh / 2.0 - 0.5);
    for y in 0..rh {
        for x in 0..rw {
            // rotate the output pixel back into chip coordinates
            let dx = x as f64 - ocx;
            let dy = y as f64 - ocy;
            let sx = cos_t * dx + sin_t * dy + scx;
            let sy = -sin_t * dx + cos_t * dy + scy;
            let inside = sx >= -0.5 && sx <= sw - 0.5 && sy >= -0.5 && sy <= sh - 0.5;
            alpha.push(inside);
            data.push(if inside {
                math::round(scaled.sample_bilinear(sx, sy)) as u8
            } else {
                0
            });
        }
    }
    Ok((
        Chip {
            raster: Raster::new(rw, rh, data)?,
            alpha,
        },
        new_box,
    ))
}

/// Object selection flag: 1 iff `candidate` has IoU strictly below `delta`
/// against every box in `existing`.
pub fn overlap_gate(candidate: &BBox, existing: &[BBox], delta: f64) -> bool {
    existing.iter().all(|e| iou(candidate, e) < delta)
}

fn place_box(b: &BBox, cx: f64, cy: f64, frame_w: f64, frame_h: f64) -> Option<BBox> {
    let w = b.width();
    let h = b.height();
    if w > frame_w || h > frame_h {
        return None;
    }
    // clamp the center so the box stays inside the frame
    let cx = cx.max(w / 2.0).min(frame_w - w / 2.0);
    let cy = cy.max(h / 2.0).min(frame_h - h / 2.0);
    b.with_coords(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0).ok()
}

/// Mix a batch: paste reliable chips from images 2..K onto image 1.
///
/// Batch entries are `(image_id, raster, scored labels)`. K < 2 returns
/// image 1 (or an empty plan for an empty batch is an error upstream)
/// unchanged.
pub fn mix_batch(
    batch: &[(u64, Raster, Vec<ScoredPseudoLabel>)],
    cfg: &MixConfig,
    batch_seed: u64,
) -> Result<(MixedImage, MixPlan), CoreError> {
    cfg.validate()?;
    let (target_id, target_raster, target_labels) = match batch.first() {
        Some((id, r, l)) => (*id, r, l),
        None => {
            return Err(CoreError::InvalidConfig(String::from("empty batch")));
        }
    };

    let mut labels = filter_reliable(target_labels, cfg.gamma_hat);
    let mut raster = target_raster.clone();
    let mut gating: Vec<BBox> = labels.iter().map(|l| l.bbox.clone()).collect();
    let mut plan = MixPlan {
        target_image_id: target_id,
        pastes: Vec::new(),
    };

    let frame_w = raster.width() as f64;
    let frame_h = raster.height() as f64;

    for (k, (src_id, src_raster, src_labels)) in batch.iter().enumerate().skip(1) {
        for (i, label) in filter_reliable(src_labels, cfg.gamma_hat).iter().enumerate() {
            // one stream per candidate so thread scheduling cannot reorder draws
            let mut rng = candidate_rng(batch_seed, cfg.seed, k as u64, i as u64);
            let rotation = if cfg.rotation_deg > 0.0 {
                rng.random_range(-cfg.rotation_deg..cfg.rotation_deg)
            } else {
                0.0
            };
            let scale = if cfg.scale_range.1 > cfg.scale_range.0 {
                rng.random_range(cfg.scale_range.0..cfg.scale_range.1)
            } else {
                cfg.scale_range.0
            };

            let mut record = PasteRecord {
                source_image_id: *src_id,
                source_box: label.bbox.clone(),
                rotation_deg: rotation,
                scale,
                destination: None,
                pixel_rect: None,
                accepted: false,
            };

            let at_cap = cfg
                .max_pastes_per_image
                .is_some_and(|cap| plan.accepted() >= cap);

            if !at_cap {
                if let Ok((chip, new_box)) = augment_chip(src_raster, &label.bbox, rotation, scale)
                {
                    let (scx, scy) = label.bbox.center();
                    let mut centers = Vec::new();
                    centers.push((scx, scy));
                    if cfg.placement == Placement::RandomRetry {
                        for _ in 0..10 {
                            centers.push((
                                rng.random_range(0.0..frame_w),
                                rng.random_range(0.0..frame_h),
                            ));
                        }
                    }
                    for (cx, cy) in centers {
                        let Some(dest) = place_box(&new_box, cx, cy, frame_w, frame_h) else {
                            break;
                        };
                        record.destination = Some(dest.clone());
                        if overlap_gate(&dest, &gating, cfg.delta) {
                            let ox = math::round(dest.x1()) as i64;
                            let oy = math::round(dest.y1()) as i64;
                            chip.composite_onto(&mut raster, ox, oy);
                            record.pixel_rect =
                                Some((ox, oy, chip.raster.width(), chip.raster.height()));
                            record.accepted = true;
                            gating.push(dest.clone());
                            labels.push(ScoredPseudoLabel {
                                bbox: dest,
                                reliability: label.reliability,
                                per_view_evidence: label.per_view_evidence.clone(),
                            });
                            break;
                        }
                    }
                }
            }
            plan.pastes.push(record);
        }
    }

    Ok((MixedImage { raster, labels }, plan))
}

fn candidate_rng(batch_seed: u64, cfg_seed: u64, k: u64, i: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&batch_seed.to_le_bytes());
    key[8..16].copy_from_slice(&cfg_seed.to_le_bytes());
    key[16..24].copy_from_slice(&k.to_le_bytes());
    key[24..].copy_from_slice(&i.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
