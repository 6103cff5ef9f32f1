//! Run manifest written alongside every command's outputs. Re-running the
//! recorded command line reproduces the outputs byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ManifestFlags {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_recipients: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drop_uncovered: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Full argv of the invocation.
    pub command: Vec<String>,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heuristic: Option<String>,
    pub flags: ManifestFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub out_dir: String,
}

impl RunManifest {
    pub fn new(out_dir: &Path) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            command: std::env::args().collect(),
            inputs: Vec::new(),
            heuristic: None,
            flags: ManifestFlags::default(),
            seed: None,
            out_dir: out_dir.display().to_string(),
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(dir.join("manifest.json"), bytes)
    }
}
