use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Record of one run, written as `manifest.json` next to the outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Collects output files for a run.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    started: Instant,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Lib(e.into()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
        self.write(name, text.as_bytes())
    }

    /// Writes the manifest after checking that every output is non-empty.
    pub fn finish(self, subcommand: &str, config_text: &str, parameters: serde_json::Value) -> Result<(), CliError> {
        for f in &self.files {
            let len = fs::metadata(self.dir.join(f)).map(|m| m.len()).unwrap_or(0);
            if len == 0 {
                return Err(CliError::Lib(floatbody::Error::Io(format!("output {f} is missing or empty"))));
            }
        }
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config_hash: config_hash(config_text),
            parameters,
            outputs: self.files.clone(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Input(e.to_string()))?;
        fs::write(self.dir.join("manifest.json"), text).map_err(|e| CliError::Lib(e.into()))
    }
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
