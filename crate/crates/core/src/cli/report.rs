//! Run manifests and report serialization (JSON canonical, CSV flat).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Everything needed to re-run a command and reproduce its numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Command line as given.
    pub argv: Vec<String>,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    pub seed: u64,
    pub toolkit_version: String,
    /// Worker threads (does not affect numeric results).
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub input_digests: Vec<InputDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        Ok(Self {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

/// A complete report: manifest plus command-specific body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub report: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flattens a JSON value into `(dotted.path, scalar)` rows; array elements
/// are addressed by index.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    flatten_into(value, String::new(), &mut rows);
    rows
}

fn flatten_into(value: &Value, prefix: String, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(v, join(k), rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(v, join(&i.to_string()), rows);
            }
        }
        Value::Null => rows.push((prefix, String::new())),
        Value::String(s) => rows.push((prefix, s.clone())),
        other => rows.push((prefix, other.to_string())),
    }
}

/// Renders the whole report before anything is written.
pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let value = serde_json::to_value(report)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).map_err(csv_err)?;
            for (k, v) in flatten(&value) {
                w.write_record([k, v]).map_err(csv_err)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::Numerical(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Writes `text` to `path` atomically (temporary file then rename), or to
/// stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        Some(p) => {
            let tmp = p.with_extension("partial");
            fs::write(&tmp, text)?;
            fs::rename(&tmp, p)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_addresses_nested_values() {
        let v: Value = serde_json::json!({"a": {"b": [1, 2]}, "c": "x", "n": null});
        let rows = flatten(&v);
        assert!(rows.contains(&("a.b.1".into(), "2".into())));
        assert!(rows.contains(&("c".into(), "x".into())));
        assert!(rows.contains(&("n".into(), String::new())));
    }
}
