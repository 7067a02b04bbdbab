//! Axis-aligned box algebra: IoU, corner matrices, enclosing rectangles,
//! clipping. Shared substrate for the reliability and loss modules.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// An axis-aligned box with class id and confidence.
///
/// Coordinates are continuous (sub-pixel); zero-area boxes are rejected at
/// construction so IoU and diagonal normalizations stay well-defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBBox", into = "RawBBox")]
pub struct BBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    class_id: u32,
    score: f64,
    probs: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawBBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    class_id: u32,
    score: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    probs: Option<Vec<f64>>,
}

impl TryFrom<RawBBox> for BBox {
    type Error = CoreError;
    fn try_from(r: RawBBox) -> Result<Self, CoreError> {
        match r.probs {
            Some(p) => BBox::with_probs(r.x1, r.y1, r.x2, r.y2, r.class_id, p),
            None => BBox::new(r.x1, r.y1, r.x2, r.y2, r.class_id, r.score),
        }
    }
}

impl From<BBox> for RawBBox {
    fn from(b: BBox) -> Self {
        RawBBox {
            x1: b.x1,
            y1: b.y1,
            x2: b.x2,
            y2: b.y2,
            class_id: b.class_id,
            score: b.score,
            probs: b.probs,
        }
    }
}

impl BBox {
    pub fn new(
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        class_id: u32,
        score: f64,
    ) -> Result<Self, CoreError> {
        if !(x1.is_finite() && y1.is_finite() && x2.is_finite() && y2.is_finite()) {
            return Err(CoreError::InvalidBox("non-finite coordinate".to_string()));
        }
        if x1 >= x2 || y1 >= y2 {
            return Err(CoreError::InvalidBox(format!(
                "degenerate box ({x1},{y1},{x2},{y2})"
            )));
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(CoreError::InvalidBox(format!("score {score} outside [0,1]")));
        }
        Ok(BBox {
            x1,
            y1,
            x2,
            y2,
            class_id,
            score,
            probs: None,
        })
    }

    /// Build a box whose confidence is tied to a full class-probability
    /// vector; `score = probs[class_id]` and `class_id` must be the argmax.
    pub fn with_probs(
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        class_id: u32,
        probs: Vec<f64>,
    ) -> Result<Self, CoreError> {
        let idx = class_id as usize;
        if idx >= probs.len() {
            return Err(CoreError::InvalidBox(format!(
                "class_id {class_id} outside probs of length {}",
                probs.len()
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(CoreError::InvalidBox(format!("probs sum {sum} != 1")));
        }
        let score = probs[idx];
        if probs.iter().any(|&p| p > score) {
            return Err(CoreError::InvalidBox(
                "class_id is not the argmax of probs".to_string(),
            ));
        }
        let mut b = BBox::new(x1, y1, x2, y2, class_id, score)?;
        b.probs = Some(probs);
        Ok(b)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn y1(&self) -> f64 {
        self.y1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn y2(&self) -> f64 {
        self.y2
    }
    pub fn class_id(&self) -> u32 {
        self.class_id
    }
    pub fn score(&self) -> f64 {
        self.score
    }
    pub fn probs(&self) -> Option<&[f64]> {
        self.probs.as_deref()
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }
    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    /// Same geometry, different class/score.
    pub fn relabeled(&self, class_id: u32, score: f64) -> Result<Self, CoreError> {
        BBox::new(self.x1, self.y1, self.x2, self.y2, class_id, score)
    }

    /// Same class/score/probs, different geometry.
    pub fn with_coords(&self, x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, CoreError> {
        let mut b = BBox::new(x1, y1, x2, y2, self.class_id, self.score)?;
        b.probs = self.probs.clone();
        Ok(b)
    }
}

/// The four corners of a box, clockwise from top-left.
///
/// Fixed row order keeps corner correspondence aligned when differencing
/// teacher and student corner matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerMatrix(pub [[f64; 2]; 4]);

impl CornerMatrix {
    /// Reconstruct the box this matrix was derived from. Exact.
    pub fn to_box(&self, class_id: u32, score: f64) -> Result<BBox, CoreError> {
        let [[x1, y1], _, [x2, y2], _] = self.0;
        BBox::new(x1, y1, x2, y2, class_id, score)
    }
}

/// Intersection-over-union of two boxes; 0 when disjoint, symmetric.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let ix = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let iy = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = ix * iy;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

/// Corner matrix of a box: top-left, top-right, bottom-right, bottom-left.
pub fn corners(b: &BBox) -> CornerMatrix {
    CornerMatrix([
        [b.x1, b.y1],
        [b.x2, b.y1],
        [b.x2, b.y2],
        [b.x1, b.y2],
    ])
}

/// Smallest axis-aligned box containing both inputs.
///
/// Its squared diagonal is the normalizer of the corner-regression loss.
pub fn enclosing_rect(a: &BBox, b: &BBox) -> BBox {
    // containing two valid boxes, the result cannot be degenerate
    BBox::new(
        a.x1.min(b.x1),
        a.y1.min(b.y1),
        a.x2.max(b.x2),
        a.y2.max(b.y2),
        a.class_id,
        a.score,
    )
    .expect("enclosing rect of valid boxes is valid")
}

/// Squared diagonal length of a box.
pub fn diag_sq(b: &BBox) -> f64 {
    b.width() * b.width() + b.height() * b.height()
}

/// Intersect a box with `[0,width] x [0,height]`; `None` when the clipped
/// area falls below `min_area`.
pub fn clip_to_image(b: &BBox, width: f64, height: f64, min_area: f64) -> Option<BBox> {
    let x1 = b.x1.max(0.0);
    let y1 = b.y1.max(0.0);
    let x2 = b.x2.min(width);
    let y2 = b.y2.min(height);
    if x2 - x1 <= 0.0 || y2 - y1 <= 0.0 || (x2 - x1) * (y2 - y1) < min_area {
        return None;
    }
    b.with_coords(x1, y1, x2, y2).ok()
}
