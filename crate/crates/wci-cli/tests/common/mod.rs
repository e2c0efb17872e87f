//! Helpers shared by the integration-test targets: fixed inputs, a runner
//! for the compiled binary, and byte-diff reporting against golden files.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

/// Pinned wall-clock value so `unix_time` in the manifests is reproducible.
pub const EPOCH: &str = "1700000000";

pub const SCENARIO_JSON: &str = r#"{
  "kind": "additive_null",
  "n": 60,
  "seed": 11,
  "d_x": 1,
  "d_y": 1,
  "z_lower": [0.0],
  "z_upper": [1.0],
  "f": { "kind": "affine", "intercept": [0.3], "slope": [[0.4]] },
  "g": { "kind": "affine", "intercept": [0.7], "slope": [[-0.4]] },
  "noise": { "family": "truncated_gaussian", "sigma": 0.08, "radius": 0.24 }
}
"#;

pub const SWEEP_JSON: &str = r#"{
  "mode": "type1",
  "scenario": {
    "kind": "additive_null",
    "n": 80,
    "seed": 1,
    "d_x": 1,
    "d_y": 1,
    "z_lower": [0.0],
    "z_upper": [1.0],
    "f": { "kind": "affine", "intercept": [0.3], "slope": [[0.4]] },
    "g": { "kind": "affine", "intercept": [0.7], "slope": [[-0.4]] },
    "noise": { "family": "truncated_gaussian", "sigma": 0.08, "radius": 0.24 }
  },
  "test": {
    "p": 1.0,
    "eps": 0.4,
    "lipschitz": { "l_x": 0.4, "l_y": 0.4, "l_xy": 0.5656854249492381 },
    "min_bin_samples": 3,
    "seed": 0,
    "solver": {
      "method": "auto",
      "exact_cutoff": 512,
      "reg": 0.05,
      "tol": 1e-6,
      "max_iter": 10000
    },
    "padding": 0.0
  },
  "replications": 3,
  "seed": 99
}
"#;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn run_in(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_wci"))
        .args(args)
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", EPOCH)
        .output()
        .expect("failed to spawn the wci binary");
    assert!(
        out.status.success(),
        "wci {:?} failed with {:?}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// First line where the two byte strings disagree, for readable failures.
pub fn first_divergence(a: &[u8], b: &[u8]) -> String {
    let (a, b) = (String::from_utf8_lossy(a), String::from_utf8_lossy(b));
    for (i, (la, lb)) in a.lines().zip(b.lines()).enumerate() {
        if la != lb {
            return format!("line {}:\n  expected: {la}\n  actual:   {lb}", i + 1);
        }
    }
    format!(
        "one output is a prefix of the other ({} vs {} bytes)",
        a.len(),
        b.len()
    )
}

/// Writes the fixed scenario into `dir` and generates its dataset there.
pub fn workspace_with_data() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("scenario.json"), SCENARIO_JSON).unwrap();
    run_in(
        dir.path(),
        &["gen", "--scenario", "scenario.json", "--out", "data.csv"],
    );
    dir
}
