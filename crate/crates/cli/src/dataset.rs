//! Dataset ingestion (minimal COCO-compatible annotation JSON plus
//! grayscale rasters), semi-supervised split generation and split files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rsod_core::geometry::{clip_to_image, BBox};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAnnotation {
    id: u64,
    image_id: u64,
    category_id: u32,
    /// COCO convention: `[x, y, w, h]`.
    bbox: [f64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCategory {
    id: u32,
    name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawManifest {
    images: Vec<ImageEntry>,
    #[serde(default)]
    annotations: Vec<RawAnnotation>,
    #[serde(default)]
    categories: Vec<RawCategory>,
}

/// A validated dataset: images, per-image boxes (corner form, clipped to
/// the frame) and a contiguous category id map.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub images: Vec<ImageEntry>,
    pub annotations: BTreeMap<u64, Vec<BBox>>,
    /// contiguous id -> name
    pub categories: Vec<String>,
    pub image_root: PathBuf,
    /// malformed (w <= 0 or h <= 0) boxes dropped during loading
    pub rejected_boxes: usize,
}

/// Load and validate an annotation manifest. When `check_images` is set,
/// every referenced raster file must exist under `image_root`.
pub fn load_dataset(annotation_path: &Path, image_root: &Path, check_images: bool) -> Result<Dataset> {
    let text = std::fs::read_to_string(annotation_path)
        .with_context(|| format!("reading {}", annotation_path.display()))?;
    let raw: RawManifest = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", annotation_path.display()))?;

    let mut image_ids = BTreeSet::new();
    for img in &raw.images {
        if !image_ids.insert(img.id) {
            bail!("duplicate image id {}", img.id);
        }
    }

    if check_images {
        let missing: Vec<u64> = raw
            .images
            .iter()
            .filter(|img| !image_root.join(&img.file_name).exists())
            .map(|img| img.id)
            .collect();
        if !missing.is_empty() {
            bail!("missing image files for ids {missing:?}");
        }
    }

    // remap category ids to be contiguous from 0, in ascending original order
    let mut cat_ids: Vec<u32> = raw.categories.iter().map(|c| c.id).collect();
    cat_ids.sort_unstable();
    cat_ids.dedup();
    if cat_ids.len() != raw.categories.len() {
        bail!("duplicate category ids");
    }
    let remap: BTreeMap<u32, u32> = cat_ids
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new as u32))
        .collect();
    let mut categories = vec![String::new(); cat_ids.len()];
    for c in &raw.categories {
        categories[remap[&c.id] as usize] = c.name.clone();
    }

    let dims: BTreeMap<u64, (u32, u32)> = raw
        .images
        .iter()
        .map(|i| (i.id, (i.width, i.height)))
        .collect();

    let mut seen_ann = BTreeSet::new();
    let mut annotations: BTreeMap<u64, Vec<BBox>> = BTreeMap::new();
    let mut rejected = 0usize;
    for ann in &raw.annotations {
        if !seen_ann.insert(ann.id) {
            bail!("duplicate annotation id {}", ann.id);
        }
        if !image_ids.contains(&ann.image_id) {
            bail!("annotation {} references unknown image {}", ann.id, ann.image_id);
        }
        let Some(&class_id) = remap.get(&ann.category_id) else {
            bail!("annotation {} references unknown category {}", ann.id, ann.category_id);
        };
        let [x, y, w, h] = ann.bbox;
        if w <= 0.0 || h <= 0.0 {
            rejected += 1;
            continue;
        }
        let b = BBox::new(x, y, x + w, y + h, class_id, 1.0)
            .with_context(|| format!("annotation {}", ann.id))?;
        let (iw, ih) = dims[&ann.image_id];
        if let Some(clipped) = clip_to_image(&b, iw as f64, ih as f64, 1.0) {
            annotations.entry(ann.image_id).or_default().push(clipped);
        } else {
            rejected += 1;
        }
    }

    Ok(Dataset {
        images: raw.images,
        annotations,
        categories,
        image_root: image_root.to_path_buf(),
        rejected_boxes: rejected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub labeled_fraction: f64,
    pub seed: u64,
    #[serde(default)]
    pub stratify_by_class: bool,
}

/// Partition image ids into labeled/unlabeled sets. The labeled set has
/// `round(fraction * N)` entries; both lists come back sorted.
pub fn make_split(ds: &Dataset, spec: &SplitSpec) -> Result<(Vec<u64>, Vec<u64>)> {
    if !(spec.labeled_fraction > 0.0 && spec.labeled_fraction <= 1.0) {
        bail!("labeled_fraction {} outside (0, 1]", spec.labeled_fraction);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut labeled = BTreeSet::new();

    if spec.stratify_by_class {
        // group images by their dominant class, sample per group
        let mut groups: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for img in &ds.images {
            let class = ds
                .annotations
                .get(&img.id)
                .and_then(|boxes| boxes.first().map(|b| b.class_id()))
                .unwrap_or(u32::MAX);
            groups.entry(class).or_default().push(img.id);
        }
        for ids in groups.values() {
            let mut ids = ids.clone();
            ids.shuffle(&mut rng);
            let take = (spec.labeled_fraction * ids.len() as f64).round() as usize;
            labeled.extend(ids.into_iter().take(take));
        }
    } else {
        let mut ids: Vec<u64> = ds.images.iter().map(|i| i.id).collect();
        ids.sort_unstable();
        ids.shuffle(&mut rng);
        let take = (spec.labeled_fraction * ids.len() as f64).round() as usize;
        labeled.extend(ids.into_iter().take(take));
    }

    let labeled_vec: Vec<u64> = labeled.iter().copied().collect();
    let unlabeled: Vec<u64> = ds
        .images
        .iter()
        .map(|i| i.id)
        .filter(|id| !labeled.contains(id))
        .collect();
    Ok((labeled_vec, unlabeled))
}

/// Write a split id file: sorted ids, one per line.
pub fn write_split_file(path: &Path, ids: &[u64]) -> Result<()> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    let body: String = sorted.iter().map(|id| format!("{id}\n")).collect();
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

pub fn read_split_file(path: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<u64>().context("bad id in split file"))
        .collect()
}
