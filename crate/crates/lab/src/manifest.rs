//! Run manifests: the resolved parameters of a run, a digest over them, and
//! what was written.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};

pub const TOOL_NAME: &str = "su11-phase-lab";

/// Parameters are kept in a sorted map so the JSON text, and therefore the
/// digest, does not depend on insertion order.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub config_digest: String,
    pub config_file: Option<String>,
    pub outputs: Vec<String>,
    /// Execution details that do not affect the outputs.
    pub workers: usize,
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.into(), v);
        self
    }

    /// sha256 over `{"command":..,"parameters":..,"version":..}` in compact
    /// canonical JSON.
    pub fn digest(&self) -> String {
        let canonical = serde_json::json!({
            "command": self.command,
            "parameters": self.parameters,
            "version": self.version,
        });
        let text = serde_json::to_string(&canonical).expect("manifest serializes");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }

    pub fn finish(&mut self) {
        self.config_digest = self.digest();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&mut self, path: &Path) -> LabResult<()> {
        self.finish();
        std::fs::write(path, self.to_json()).map_err(|e| LabError::io(path, e))
    }
}
