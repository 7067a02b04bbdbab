//! Detector adapter over a child process. One JSON request per line on
//! the child's stdin, one JSON detection record per line back on its
//! stdout. The `detector-stdio` subcommand is the reference server.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use rsod_core::error::CoreError;
use rsod_core::geometry::BBox;
use rsod_core::reliability::DetectionSet;
use rsod_core::synthetic::{self, NoiseModel};
use rsod_core::teacher::{Detector, ImageSample, ParamVector};
use rsod_core::view::ViewTransform;

use crate::records::{view_from_name, DetectionRecord};

/// One prediction request. The ground truth rides along for oracle-style
/// detectors; a real detector server is free to ignore it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectRequest {
    pub image_id: u64,
    pub width: f64,
    pub height: f64,
    pub view: String,
    pub gt: Vec<BBox>,
    pub params: Vec<f64>,
    pub seed: u64,
}

pub struct SubprocessDetector {
    child: Mutex<(BufWriter<ChildStdin>, BufReader<ChildStdout>, Child)>,
}

impl SubprocessDetector {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .with_context(|| format!("spawning detector {program}"))?;
        let stdin = child.stdin.take().context("no child stdin")?;
        let stdout = child.stdout.take().context("no child stdout")?;
        Ok(SubprocessDetector {
            child: Mutex::new((BufWriter::new(stdin), BufReader::new(stdout), child)),
        })
    }

    fn round_trip(&self, req: &DetectRequest) -> Result<DetectionSet> {
        let mut guard = self.child.lock().expect("detector mutex poisoned");
        let (stdin, stdout, _) = &mut *guard;
        serde_json::to_writer(&mut *stdin, req)?;
        stdin.write_all(b"\n")?;
        stdin.flush()?;
        let mut line = String::new();
        let n = stdout.read_line(&mut line)?;
        anyhow::ensure!(n > 0, "detector closed its stdout");
        let record: DetectionRecord =
            serde_json::from_str(line.trim_end()).context("malformed detector response")?;
        record.to_set()
    }
}

impl Drop for SubprocessDetector {
    fn drop(&mut self) {
        if let Ok(mut guard) = self.child.lock() {
            let _ = guard.2.kill();
            let _ = guard.2.wait();
        }
    }
}

impl Detector for SubprocessDetector {
    fn predict(
        &self,
        sample: &ImageSample,
        view: &ViewTransform,
        params: &ParamVector,
        seed: u64,
    ) -> Result<DetectionSet, CoreError> {
        let req = DetectRequest {
            image_id: sample.image_id,
            width: sample.raster.width() as f64,
            height: sample.raster.height() as f64,
            view: view.name().to_string(),
            gt: sample.gt.clone(),
            params: params.0.clone(),
            seed,
        };
        self.round_trip(&req).map_err(|e| CoreError::DetectorFailure {
            image_id: sample.image_id,
            message: format!("{e:#}"),
        })
    }
}

/// Serve the synthetic detector over stdin/stdout until EOF.
pub fn serve_stdio(noise: &NoiseModel, input: impl BufRead, mut output: impl Write) -> Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let req: DetectRequest = serde_json::from_str(&line).context("malformed request")?;
        let view = view_from_name(&req.view, req.width)?;
        let set = synthetic::predict(
            req.image_id,
            &req.gt,
            req.width,
            req.height,
            &view,
            noise,
            req.seed,
        )?;
        let record = DetectionRecord::from_set(&set, req.width, req.height);
        serde_json::to_writer(&mut output, &record)?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rsod_core::raster::Raster;

    fn sample() -> ImageSample {
        ImageSample {
            image_id: 3,
            raster: Raster::filled(100, 80, 40).unwrap(),
            gt: vec![BBox::new(10.0, 10.0, 40.0, 40.0, 1, 1.0).unwrap()],
        }
    }

    #[test]
    fn stdio_server_matches_in_process_oracle() {
        let noise = NoiseModel::default();
        let s = sample();
        let req = DetectRequest {
            image_id: s.image_id,
            width: 100.0,
            height: 80.0,
            view: "mirror".to_string(),
            gt: s.gt.clone(),
            params: vec![],
            seed: 77,
        };
        let input = format!("{}\n", serde_json::to_string(&req).unwrap());
        let mut out = Vec::new();
        serve_stdio(&noise, input.as_bytes(), &mut out).unwrap();
        let record: DetectionRecord =
            serde_json::from_str(String::from_utf8(out).unwrap().trim()).unwrap();
        let direct = synthetic::predict(
            3,
            &s.gt,
            100.0,
            80.0,
            &ViewTransform::MirrorHorizontal { image_width: 100.0 },
            &noise,
            77,
        )
        .unwrap();
        assert_eq!(record.to_set().unwrap(), direct);
    }
}
