//! The run manifest: everything needed to rerun a command bit for bit.

use std::path::Path;

use irbm::data_io::Dataset;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{write_file, CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub path: String,
    /// SHA-256 of the file as read from disk.
    pub sha256: String,
    pub rows: usize,
    pub dims: usize,
}

impl DatasetInfo {
    pub fn describe(path: &Path, dataset: &Dataset) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(Self { path: path.display().to_string(), sha256: hex(&Sha256::digest(&bytes)), rows: dataset.len(), dims: dataset.dims() })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub datasets: Vec<DatasetInfo>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, datasets: Vec<DatasetInfo>) -> Self {
        Self { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), config, datasets }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}
