use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rsod_core::eval::{evaluate, reliability_sweep, GroundTruth};
use rsod_core::geometry::{iou, BBox};
use rsod_core::raster::Raster;
use rsod_core::reliability::{assess, ScoredPseudoLabel};
use rsod_core::synthetic::{predict, NoiseModel};
use rsod_core::teacher::{
    run_iteration, subseed, ImageSample, IterationTrace, ParamVector, SyntheticDetector,
};
use rsod_core::view::ViewTransform;

use crate::commands::{write_json_pretty, SummaryLine};
use crate::config::HarnessConfig;
use crate::records::write_jsonl;

#[derive(Serialize)]
struct Summary {
    seed: u64,
    images: usize,
    labeled: usize,
    unlabeled: usize,
    iterations: u32,
    final_map: f64,
    final_l_total: f64,
    final_l_plrw: f64,
    final_l_cprl: f64,
    mean_reliability_correlated: f64,
    mean_reliability_independent: f64,
    teacher_param_norm: f64,
}

/// Generate a seeded synthetic corpus, run the teacher-student loop for
/// the configured number of iterations and write all run artifacts.
pub fn run(cfg: &HarnessConfig, out_dir: &Path) -> Result<SummaryLine> {
    let sim = &cfg.simulate;
    let seed = cfg.seed;

    // corpus
    let mut samples = Vec::with_capacity(sim.num_images as usize);
    for id in 0..sim.num_images as u64 {
        samples.push(make_sample(id, sim, subseed(seed, "corpus", id)));
    }

    // split
    let mut ids: Vec<u64> = samples.iter().map(|s| s.image_id).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, "split", 0));
    ids.shuffle(&mut rng);
    let n_labeled = ((cfg.split.labeled_fraction * ids.len() as f64).round() as usize)
        .clamp(1, ids.len() - 2);
    let labeled_ids: Vec<u64> = {
        let mut v = ids[..n_labeled].to_vec();
        v.sort_unstable();
        v
    };
    let unlabeled_ids: Vec<u64> = {
        let mut v = ids[n_labeled..].to_vec();
        v.sort_unstable();
        v
    };
    let by_id: BTreeMap<u64, &ImageSample> = samples.iter().map(|s| (s.image_id, s)).collect();

    // loop
    let detector = SyntheticDetector {
        noise: cfg.noise.clone(),
    };
    let mut teacher = ParamVector(vec![1.0; sim.param_dim]);
    let student = ParamVector(vec![0.0; sim.param_dim]);
    let mut traces: Vec<IterationTrace> = Vec::with_capacity(sim.iterations as usize);

    let losses_path = out_dir.join("losses.csv");
    let mut losses_csv = BufWriter::new(
        File::create(&losses_path).with_context(|| format!("creating {}", losses_path.display()))?,
    );
    writeln!(
        losses_csv,
        "iteration,l_sup,l_plrw,l_cprl,l_unsup,l_total,n_plrw_pairs,n_cprl_pairs,accepted_pastes,teacher_param_norm"
    )?;

    for i in 0..sim.iterations {
        let unlabeled_batch = take_batch(&unlabeled_ids, i as usize, sim.unlabeled_batch, &by_id);
        let labeled_batch = take_batch(&labeled_ids, i as usize, sim.labeled_batch, &by_id);
        let trace = run_iteration(
            &labeled_batch,
            &unlabeled_batch,
            &detector,
            &cfg.pipeline,
            &teacher,
            &student,
            subseed(seed, "iter", i as u64),
        )?;
        teacher = trace.teacher_params_after.clone();
        let norm = l2_norm(&teacher);
        writeln!(
            losses_csv,
            "{},{},{},{},{},{},{},{},{},{}",
            i,
            trace.losses.l_sup,
            trace.losses.l_plrw,
            trace.losses.l_cprl,
            trace.losses.l_unsup,
            trace.losses.l_total,
            trace.losses.n_plrw_pairs,
            trace.losses.n_cprl_pairs,
            trace.mix_plan.accepted(),
            norm
        )?;
        traces.push(trace);
    }
    losses_csv.flush()?;
    write_jsonl(&out_dir.join("traces.jsonl"), &traces)?;

    // final teacher assessment over the whole unlabeled split
    let (labels, originals) = assess_split(&unlabeled_ids, &by_id, &cfg.noise, cfg, seed)?;
    let gt: GroundTruth = unlabeled_ids
        .iter()
        .map(|id| (*id, by_id[id].gt.clone()))
        .collect();

    let sweep = reliability_sweep(&labels, &gt, &sim.sweep_thresholds, sim.eval_iou);
    let sweep_path = out_dir.join("sweep.csv");
    let mut sweep_csv = BufWriter::new(File::create(&sweep_path)?);
    writeln!(sweep_csv, "gamma_hat,kept,precision,recall")?;
    for row in &sweep {
        writeln!(
            sweep_csv,
            "{},{},{},{}",
            row.gamma_hat, row.kept, row.precision, row.recall
        )?;
    }
    sweep_csv.flush()?;

    let report = evaluate(&originals, &gt, sim.eval_iou);
    write_json_pretty(&out_dir.join("eval.json"), &report)?;

    // reliability under shared versus independent view noise
    let mean_cor = mean_reliability(&unlabeled_ids, &by_id, cfg, true, seed)?;
    let mean_ind = mean_reliability(&unlabeled_ids, &by_id, cfg, false, seed)?;

    let last = traces.last().context("no iterations ran")?;
    let summary = Summary {
        seed,
        images: samples.len(),
        labeled: labeled_ids.len(),
        unlabeled: unlabeled_ids.len(),
        iterations: sim.iterations,
        final_map: report.map,
        final_l_total: last.losses.l_total,
        final_l_plrw: last.losses.l_plrw,
        final_l_cprl: last.losses.l_cprl,
        mean_reliability_correlated: mean_cor,
        mean_reliability_independent: mean_ind,
        teacher_param_norm: l2_norm(&teacher),
    };
    write_json_pretty(&out_dir.join("summary.json"), &summary)?;
    cfg.write_effective(out_dir)?;

    Ok(SummaryLine(format!(
        "simulate: {} iterations over {} images, final mAP {:.4}, total loss {:.4}",
        sim.iterations,
        samples.len(),
        summary.final_map,
        summary.final_l_total
    )))
}

fn l2_norm(p: &ParamVector) -> f64 {
    p.0.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn take_batch(
    ids: &[u64],
    iteration: usize,
    batch: usize,
    by_id: &BTreeMap<u64, &ImageSample>,
) -> Vec<ImageSample> {
    if ids.is_empty() || batch == 0 {
        return Vec::new();
    }
    let n = batch.min(ids.len());
    let start = (iteration * batch) % ids.len();
    (0..n)
        .map(|k| by_id[&ids[(start + k) % ids.len()]].clone())
        .collect()
}

/// One synthetic image: speckled background with brighter box-shaped
/// objects, plus its ground truth.
fn make_sample(image_id: u64, sim: &crate::config::SimulateConfig, seed: u64) -> ImageSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fw = sim.frame_width as f64;
    let fh = sim.frame_height as f64;
    let n = rng.random_range(1..=sim.max_objects_per_image.max(1));
    let mut gt: Vec<BBox> = Vec::new();
    let mut attempts = 0;
    // integer pixel coordinates keep the augmented-view round trips exact
    while gt.len() < n as usize {
        let w = rng.random_range(sim.frame_width / 10..sim.frame_width / 4).max(2) as f64;
        let h = rng.random_range(sim.frame_height / 10..sim.frame_height / 4).max(2) as f64;
        let x1 = rng.random_range(0..(fw - w) as u32) as f64;
        let y1 = rng.random_range(0..(fh - h) as u32) as f64;
        let class = rng.random_range(0..sim.num_classes);
        let b = BBox::new(x1, y1, x1 + w, y1 + h, class, 1.0).unwrap();
        attempts += 1;
        if gt.iter().all(|e| iou(e, &b) < 0.3) || attempts > 1000 {
            gt.push(b);
        }
    }

    let mut raster = Raster::filled(sim.frame_width, sim.frame_height, 40).unwrap();
    for _ in 0..(sim.frame_width as usize * sim.frame_height as usize / 40) {
        let x = rng.random_range(0..sim.frame_width);
        let y = rng.random_range(0..sim.frame_height);
        raster.set(x, y, rng.random_range(20..70));
    }
    for b in &gt {
        let value = 130u8.saturating_add((b.class_id().min(3) as u8) * 35);
        for y in b.y1().max(0.0) as u32..(b.y2().min(fh) as u32) {
            for x in b.x1().max(0.0) as u32..(b.x2().min(fw) as u32) {
                raster.set(x, y, value);
            }
        }
    }
    ImageSample {
        image_id,
        raster,
        gt,
    }
}

/// Scored labels per image plus the identity-view detections.
type SplitAssessment = (
    BTreeMap<u64, Vec<ScoredPseudoLabel>>,
    Vec<rsod_core::reliability::DetectionSet>,
);

/// Teacher multi-view assessment of every image in the split.
fn assess_split(
    ids: &[u64],
    by_id: &BTreeMap<u64, &ImageSample>,
    noise: &NoiseModel,
    cfg: &HarnessConfig,
    seed: u64,
) -> Result<SplitAssessment> {
    let rel = &cfg.pipeline.reliability;
    let mut labels = BTreeMap::new();
    let mut originals = Vec::new();
    for id in ids {
        let s = by_id[id];
        let fw = s.raster.width() as f64;
        let fh = s.raster.height() as f64;
        let transforms: Vec<ViewTransform> = rel.views.iter().map(|v| v.to_transform(fw)).collect();
        let s_seed = subseed(seed, "final", *id);
        let original = predict(*id, &s.gt, fw, fh, &ViewTransform::Identity, noise, s_seed)?;
        let augmented = transforms
            .iter()
            .map(|t| predict(*id, &s.gt, fw, fh, t, noise, s_seed))
            .collect::<Result<Vec<_>, _>>()?;
        let scored = assess(&original, &augmented, &transforms, rel)?;
        labels.insert(*id, scored);
        originals.push(original);
    }
    Ok((labels, originals))
}

fn mean_reliability(
    ids: &[u64],
    by_id: &BTreeMap<u64, &ImageSample>,
    cfg: &HarnessConfig,
    correlated: bool,
    seed: u64,
) -> Result<f64> {
    let noise = NoiseModel {
        correlated,
        ..cfg.noise.clone()
    };
    let (labels, _) = assess_split(ids, by_id, &noise, cfg, subseed(seed, "noise-compare", 0))?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for scored in labels.values() {
        for l in scored {
            sum += l.reliability;
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}
