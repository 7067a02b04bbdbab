use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rsod_cli::commands::{self, ensure_out_dir, SummaryLine};
use rsod_cli::config::HarnessConfig;
use rsod_cli::subprocess::serve_stdio;

#[derive(Parser)]
#[command(name = "rsod", about = "reliability-scored pseudo-label pipeline harness", version)]
struct Cli {
    /// Harness configuration file (JSON); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root random seed, overriding the configured one.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for run artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a dataset manifest into labeled and unlabeled id lists.
    Split,
    /// Score pseudo-labels from per-view teacher detection files.
    Score {
        /// Detection files (line-delimited JSON); pooled across views.
        #[arg(required = true)]
        detections: Vec<PathBuf>,
    },
    /// Synthesize one object-mixed composite from a scored batch.
    Mix {
        /// Scored pseudo-label file.
        scored: PathBuf,
        /// Directory with per-image rasters named `{image_id}.png`.
        images: PathBuf,
    },
    /// Compute the reliability-weighted losses for student detections.
    Losses {
        /// Student detections (identity view).
        student: PathBuf,
        /// Scored pseudo-label file.
        scored: PathBuf,
    },
    /// Run the synthetic end-to-end teacher-student simulation.
    Simulate,
    /// Evaluate a detections file against the manifest's ground truth.
    Evaluate {
        /// Predictions to score.
        predictions: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        iou_thresh: f64,
    },
    /// Serve the synthetic detector over stdin/stdout (one JSON per line).
    DetectorStdio,
}

fn run(cli: Cli) -> anyhow::Result<SummaryLine> {
    let mut cfg = match &cli.config {
        Some(path) => HarnessConfig::load(path)?,
        None => {
            let mut c = HarnessConfig::default();
            c.apply_env();
            c.validate()?;
            c
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }

    match cli.command {
        Command::DetectorStdio => {
            let stdin = std::io::stdin();
            let stdout = std::io::stdout();
            serve_stdio(&cfg.noise, stdin.lock(), stdout.lock())?;
            Ok(SummaryLine(String::new()))
        }
        command => {
            let out_dir = ensure_out_dir(&cfg, cli.out.as_deref())?;
            match command {
                Command::Split => commands::split::run(&cfg, &out_dir),
                Command::Score { detections } => {
                    let paths: Vec<&std::path::Path> =
                        detections.iter().map(PathBuf::as_path).collect();
                    commands::score::run(&cfg, &paths, &out_dir)
                }
                Command::Mix { scored, images } => {
                    commands::mix::run(&cfg, &scored, &images, cfg.seed, &out_dir)
                }
                Command::Losses { student, scored } => {
                    commands::losses::run(&cfg, &student, &scored, &out_dir)
                }
                Command::Simulate => commands::simulate::run(&cfg, &out_dir),
                Command::Evaluate {
                    predictions,
                    iou_thresh,
                } => commands::evaluate::run(&cfg, &predictions, iou_thresh, &out_dir),
                Command::DetectorStdio => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(SummaryLine(line)) => {
            if !line.is_empty() {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            // machine-readable failure record on stderr
            let payload = serde_json::json!({ "error": format!("{err:#}") });
            let mut stderr = std::io::stderr();
            let _ = writeln!(stderr, "{payload}");
            ExitCode::FAILURE
        }
    }
}
