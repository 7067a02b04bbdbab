//! Line-delimited record formats: detection sets, scored pseudo-labels,
//! mix plans and loss reports. One JSON object per line; coordinates are
//! serialized at full double precision so round trips are lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use rsod_core::geometry::BBox;
use rsod_core::reliability::{DetectionSet, ScoredPseudoLabel};
use rsod_core::view::ViewTransform;

/// One detection record line: `{image_id, view, width, height, boxes}`.
/// The view is a stable string name; the frame dimensions make the
/// transform reconstructible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub image_id: u64,
    pub view: String,
    pub width: f64,
    pub height: f64,
    pub boxes: Vec<BBox>,
}

/// Parse a view name back into a transform for the given frame.
pub fn view_from_name(name: &str, image_width: f64) -> Result<ViewTransform> {
    if name == "identity" {
        Ok(ViewTransform::Identity)
    } else if name == "mirror" {
        Ok(ViewTransform::MirrorHorizontal { image_width })
    } else if let Some(factor) = name.strip_prefix("scale_") {
        let factor: f64 = factor.parse().context("bad scale factor in view name")?;
        Ok(ViewTransform::Scale { factor })
    } else {
        bail!("unknown view name {name:?}")
    }
}

impl DetectionRecord {
    pub fn from_set(set: &DetectionSet, width: f64, height: f64) -> Self {
        DetectionRecord {
            image_id: set.image_id,
            view: set.view.name().to_string(),
            width,
            height,
            boxes: set.boxes.clone(),
        }
    }

    pub fn to_set(&self) -> Result<DetectionSet> {
        Ok(DetectionSet {
            image_id: self.image_id,
            view: view_from_name(&self.view, self.width)?,
            boxes: self.boxes.clone(),
        })
    }
}

/// One scored pseudo-label record line per image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub image_id: u64,
    pub width: f64,
    pub height: f64,
    pub labels: Vec<ScoredPseudoLabel>,
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed record", path.display(), lineno + 1))?;
        out.push(rec);
    }
    Ok(out)
}

/// Write detection sets as line-delimited records.
pub fn write_detections(path: &Path, sets: &[(DetectionSet, f64, f64)]) -> Result<()> {
    let records: Vec<DetectionRecord> = sets
        .iter()
        .map(|(s, w, h)| DetectionRecord::from_set(s, *w, *h))
        .collect();
    write_jsonl(path, &records)
}

/// Read detection sets back, reconstructing the view transforms.
pub fn read_detections(path: &Path) -> Result<Vec<(DetectionSet, f64, f64)>> {
    let records: Vec<DetectionRecord> = read_jsonl(path)?;
    records
        .iter()
        .map(|r| Ok((r.to_set()?, r.width, r.height)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    fn random_set(rng: &mut ChaCha8Rng, image_id: u64) -> DetectionSet {
        let n = rng.random_range(0..5);
        let boxes = (0..n)
            .map(|_| {
                let x1 = rng.random_range(0.0..50.0);
                let y1 = rng.random_range(0.0..50.0);
                let w = rng.random_range(0.5..40.0);
                let h = rng.random_range(0.5..40.0);
                BBox::new(x1, y1, x1 + w, y1 + h, rng.random_range(0..5), rng.random_range(0.0..1.0))
                    .unwrap()
            })
            .collect();
        let view = match rng.random_range(0..3) {
            0 => ViewTransform::Identity,
            1 => ViewTransform::MirrorHorizontal { image_width: 100.0 },
            _ => ViewTransform::Scale { factor: 0.75 },
        };
        DetectionSet {
            image_id,
            view,
            boxes,
        }
    }

    #[test]
    fn round_trip_many_seeded_sets() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("dets.jsonl");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sets: Vec<_> = (0..1000)
            .map(|i| (random_set(&mut rng, i), 100.0, 80.0))
            .collect();
        write_detections(&path, &sets).unwrap();
        let back = read_detections(&path).unwrap();
        assert_eq!(back.len(), sets.len());
        for ((a, _, _), (b, _, _)) in sets.iter().zip(&back) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn empty_boxes_is_valid() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("dets.jsonl");
        let set = DetectionSet {
            image_id: 1,
            view: ViewTransform::Identity,
            boxes: vec![],
        };
        write_detections(&path, &[(set.clone(), 10.0, 10.0)]).unwrap();
        let back = read_detections(&path).unwrap();
        assert_eq!(back[0].0, set);
    }

    #[test]
    fn probs_optional_on_record() {
        let with = BBox::with_probs(0.0, 0.0, 5.0, 5.0, 0, vec![0.8, 0.2]).unwrap();
        let without = BBox::new(0.0, 0.0, 5.0, 5.0, 0, 0.8).unwrap();
        let j_with = serde_json::to_string(&with).unwrap();
        let j_without = serde_json::to_string(&without).unwrap();
        assert!(j_with.contains("probs"));
        assert!(!j_without.contains("probs"));
        let back: BBox = serde_json::from_str(&j_without).unwrap();
        assert!(back.probs().is_none());
        assert_eq!(back.score(), 0.8);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"image_id\":1,\"view\":\"identity\",\"width\":10,\"height\":10,\"boxes\":[]}\nnot json\n").unwrap();
        let err = read_detections(&path).unwrap_err();
        assert!(format!("{err:#}").contains(":2"));
    }

    #[test]
    fn invalid_box_rejected_on_read() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(
            &path,
            "{\"image_id\":1,\"view\":\"identity\",\"width\":10,\"height\":10,\"boxes\":[{\"x1\":5,\"y1\":0,\"x2\":1,\"y2\":3,\"class_id\":0,\"score\":0.5}]}\n",
        )
        .unwrap();
        assert!(read_detections(&path).is_err());
    }
}
