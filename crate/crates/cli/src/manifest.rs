use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use subpareto::subgroup::ScanConfig;

/// Everything needed to reproduce one output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ScanConfig>,
    /// Command arguments that are neither inputs nor part of the scan config.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[&Path], started: Instant) -> Self {
        Self {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
            config: None,
            options: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng_seed: None,
            duration_seconds: started.elapsed().as_secs_f64(),
        }
    }

    pub fn option(mut self, key: &str, value: impl ToString) -> Self {
        self.options.insert(key.to_string(), value.to_string());
        self
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        fs::write(path, json)
    }
}

/// `out.csv` -> `out.csv.manifest.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
