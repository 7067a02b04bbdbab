//! Command implementations. Each takes the resolved configuration plus
//! its own arguments and writes artifacts under the output directory;
//! anything printed to stdout is a one-line human summary.

pub mod evaluate;
pub mod losses;
pub mod mix;
pub mod score;
pub mod simulate;
pub mod split;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::HarnessConfig;

/// One-line human summary printed by the binary on success.
pub struct SummaryLine(pub String);

/// Resolve the output directory (flag beats config beats cwd) and create it.
pub fn ensure_out_dir(cfg: &HarnessConfig, flag: Option<&Path>) -> Result<PathBuf> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

pub fn write_json_pretty<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
