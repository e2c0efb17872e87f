//! Run manifests: every report embeds the command, resolved configuration,
//! seed, input digests, tool version, and a timestamp, so a report can be
//! traced to — and regenerated from — exactly what produced it.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Report envelope version; bump when the JSON layout changes.
pub const SCHEMA: &str = "wci/v1";

#[derive(Debug, Serialize)]
pub struct InputDigest {
    /// The path exactly as given on the command line.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the
    /// clock for reproducible output.
    pub unix_time: u64,
    pub inputs: Vec<InputDigest>,
    /// The fully-resolved configuration the run actually used.
    pub config: serde_json::Value,
    /// Estimates recorded before the main run (e.g. bootstrapped
    /// smoothness constants).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            unix_time: unix_time(),
            inputs: Vec::new(),
            config,
            derived: None,
        }
    }

    /// Registers an input file: records its digest, returns its bytes.
    pub fn ingest(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| {
            CliError::input(format!("cannot read {}: {e}", path.display()))
        })?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(bytes)
    }
}

fn unix_time() -> u64 {
    if let Ok(fixed) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(v) = fixed.trim().parse() {
            return v;
        }
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// The uniform output shape of every command.
#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub report: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(manifest: RunManifest, report: T) -> Self {
        Envelope {
            schema: SCHEMA,
            manifest,
            report,
        }
    }

    /// Pretty-printed JSON to the path, or stdout when none is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
        text.push('\n');
        match out {
            Some(path) => fs::write(path, text).map_err(|e| {
                CliError::input(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::input(format!("cannot write to stdout: {e}")))
            }
        }
    }
}
