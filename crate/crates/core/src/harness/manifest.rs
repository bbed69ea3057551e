use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scheme::{FirstStepVariant, SchemeKind, StabilityReport};

/// Hex SHA-256 of a file's contents.
pub fn file_sha256(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one run or study written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub scheme: SchemeKind,
    pub n: usize,
    pub m: usize,
    pub t_final: f64,
    pub stability: StabilityReport,
    pub first_step: FirstStepVariant,
    pub workers: usize,
    pub wall_time_s: f64,
    pub stepping_time_s: f64,
    pub cpu_rel: Option<f64>,
    pub outputs: Vec<OutputFile>,
    pub version: String,
    /// Free-form measurements, e.g. the integral of the source bump.
    #[serde(default)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    /// Hashes `path` and appends it to the inventory.
    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        let sha256 = file_sha256(path)?;
        self.outputs.push(OutputFile {
            path: path.to_path_buf(),
            sha256,
        });
        Ok(())
    }

    /// Re-hashes every listed file; returns the paths that are missing or changed.
    pub fn verify(&self) -> Vec<PathBuf> {
        self.outputs
            .iter()
            .filter(|o| file_sha256(&o.path).map(|h| h != o.sha256).unwrap_or(true))
            .map(|o| o.path.clone())
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
