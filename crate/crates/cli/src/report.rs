use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(rename = "inputs-digest")]
    pub inputs_digest: String,
    pub outputs: serde_json::Value,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    pub fn le(name: &str, value: f64, bound: f64) -> Check {
        Check { name: name.into(), pass: value <= bound, value, bound }
    }

    pub fn ge(name: &str, value: f64, bound: f64) -> Check {
        Check { name: name.into(), pass: value >= bound, value, bound }
    }
}

/// SHA-256 over the arguments and every input file, in order.
#[derive(Default)]
pub struct Digest256(Sha256);

impl Digest256 {
    pub fn update(&mut self, tag: &str, bytes: &[u8]) {
        self.0.update((tag.len() as u64).to_le_bytes());
        self.0.update(tag.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::Input(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
