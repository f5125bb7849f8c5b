//! Output writing: CSV tables, JSON diagnostics, and the run manifest.
//! All numeric formatting goes through the shortest round-trip form so
//! identical runs produce identical bytes.

use crate::config::ResolvedConfig;
use anyhow::{bail, Context};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal form of a float.
pub fn fmt_f(x: f64) -> String {
    format!("{x}")
}

/// Guard a value destined for a flag-less CSV cell.
pub fn finite(x: f64, what: &str) -> anyhow::Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        bail!("non-finite {what}: {x}")
    }
}

pub struct OutputDir {
    dir: PathBuf,
    stem: String,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path, stem: &str) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            files: Vec::new(),
        })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}_{suffix}", self.stem))
    }

    pub fn write(&mut self, suffix: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.path(suffix);
        fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path.file_name().unwrap().to_string_lossy().into_owned());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, suffix: &str, value: &T) -> anyhow::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(suffix, &text)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

/// Run metadata written last: the resolved configuration, tool version,
/// wall-clock duration, per-subtask flags, and every file the run produced.
/// The duration field varies between runs; result files do not.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub tool_version: &'static str,
    pub subcommand: &'a str,
    pub duration_seconds: f64,
    /// Reserved: recorded when given, unused by today's deterministic runs.
    pub seed: Option<u64>,
    pub flags: &'a [String],
    pub outputs: &'a [String],
    pub config: &'a ResolvedConfig,
}

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
