//! Run manifests: the provenance record written next to every CLI output.
//!
//! Two runs whose manifests agree on everything but the timestamp produce
//! byte-identical output files; the manifest is what makes that claim
//! checkable after the fact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every input parameter of the run, flag names included.
    pub parameters: serde_json::Value,
    /// SHA-256 of the input file's bytes, when the command reads one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub version: String,
    /// RFC 3339; excluded from any reproducibility comparison.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: serde_json::Value,
        input_file: Option<&Path>,
        seed: Option<u64>,
    ) -> std::io::Result<Self> {
        let input_sha256 = match input_file {
            Some(path) => {
                let bytes = std::fs::read(path)?;
                Some(hex::encode(Sha256::digest(&bytes)))
            }
            None => None,
        };
        Ok(RunManifest {
            command: command.to_string(),
            parameters,
            input_sha256,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        })
    }

    /// Path of the manifest that accompanies `output`:
    /// `<output>.manifest.json`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_os_string();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    /// Writes the manifest next to `output`.
    pub fn write_alongside(&self, output: &Path) -> std::io::Result<()> {
        let path = Self::path_for(output);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json)
    }
}
