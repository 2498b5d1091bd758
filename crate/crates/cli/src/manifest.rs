use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub invocation: Vec<String>,
    pub master_seed: Option<u64>,
    /// SHA-256 of each input file, keyed by the path as given.
    pub input_digests: BTreeMap<String, String>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(master_seed: Option<u64>) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            invocation: std::env::args().collect(),
            master_seed,
            input_digests: BTreeMap::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest = hex::encode(Sha256::digest(bytes));
        self.input_digests
            .insert(path.display().to_string(), digest);
    }

    /// Writes `<output>.manifest.json`.
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let json = serde_json::to_string_pretty(self)?;
        fs::write(&path, json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
