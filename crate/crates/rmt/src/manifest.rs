use std::path::Path;

use rmt_core::densities::Support;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::io;
use crate::runner::SpectralSummary;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// File name relative to the manifest's directory.
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

impl OutputRecord {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = std::fs::metadata(path).map_err(crate::error::CliError::io(path))?.len();
        Ok(Self {
            file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            sha256: io::sha256_file(path)?,
            bytes,
        })
    }
}

/// Sidecar written next to every output. `config` plus `tool_version` is
/// enough to regenerate the outputs; `wall_time` and `threads` are
/// informational and do not affect any output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub sampling_hash: String,
    pub config: RunConfig,
    pub wall_time: f64,
    pub threads: usize,
    pub excluded_count: Option<u64>,
    pub irregular_exclusions: Option<u64>,
    pub norm_const: Option<f64>,
    pub support: Option<Support>,
    pub excitatory_columns: Option<usize>,
    pub summary: Option<SpectralSummary>,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        let excitatory_columns = match cfg.ensemble.kind {
            rmt_core::EnsembleKind::RajanAbbott(p) => Some(p.excitatory_count(cfg.ensemble.n)),
            _ => None,
        };
        Self {
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            config_hash: cfg.config_hash(),
            sampling_hash: cfg.sampling_hash(),
            config: cfg.clone(),
            wall_time: 0.0,
            threads: 0,
            excluded_count: None,
            irregular_exclusions: None,
            norm_const: None,
            support: None,
            excitatory_columns,
            summary: None,
            outputs: Vec::new(),
        }
    }

    /// Records `paths` and writes the manifest next to the first one.
    pub fn finish(mut self, paths: &[&Path], started: std::time::Instant) -> Result<Self> {
        self.outputs = paths.iter().map(|p| OutputRecord::of(p)).collect::<Result<_>>()?;
        self.wall_time = started.elapsed().as_secs_f64();
        io::write_json(&io::manifest_path(paths[0]), &self)?;
        Ok(self)
    }

    pub fn output(&self, file: &str) -> Option<&OutputRecord> {
        self.outputs.iter().find(|o| o.file == file)
    }
}
