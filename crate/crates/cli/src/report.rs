// SPDX-License-Identifier: Apache-2.0

//! Machine-readable run report and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::input::InputRecord;
use crate::CliError;

/// JSON record of one invocation. Object keys are emitted in sorted order.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub timestamp: String,
    pub command: String,
    pub arguments: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String, CliError> {
        // Round trip through Value so every object, nested ones included, is key-sorted.
        let v = serde_json::to_value(self).map_err(|e| CliError::Analysis(e.to_string()))?;
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Analysis(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
