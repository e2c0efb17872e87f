//! Monte-Carlo sweeps over the conditional-independence test: generate a
//! synthetic dataset, run the test, repeat, and compare the empirical
//! error frequency against the configured probability bound.
//!
//! A sweep estimates one error rate. In `Type1` mode the scenario should
//! satisfy conditional independence and the error event is a rejection;
//! in `Type2` mode the scenario should be a separated alternative and the
//! error event is an acceptance. The verdict checks
//! `empirical ≤ bound + 3·sqrt(bound·(1−bound)/R)` — three binomial
//! standard errors of slack at `R` replications, so a sound bound fails
//! the sweep with negligible probability while a wrong one is caught.
//!
//! Replication `r` seeds both the generator and the test with
//! `base_seed + r`, overriding the seeds inside the scenario and test
//! configurations; a sweep is a pure function of its config.

use serde::{Deserialize, Serialize};

use crate::ci::{run_ci_test, CIConfig, CIReport};
use crate::datagen::{generate, ScenarioSpec};
use crate::error::{Error, Result};
use crate::parallel::ordered_parallel_map;

/// Which error rate the sweep estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Null scenario; the error event is `reject`.
    Type1,
    /// Alternative scenario; the error event is `!reject`.
    Type2,
}

/// Full description of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: SweepMode,
    pub scenario: ScenarioSpec,
    pub test: CIConfig,
    pub replications: usize,
    /// Base seed; replication r runs on `seed + r`.
    pub seed: u64,
}

/// One replication's digest.
#[derive(Debug, Clone, Serialize)]
pub struct SimReplication {
    pub index: usize,
    pub seed: u64,
    pub reject: bool,
    pub type1_total: f64,
    pub type2_total: f64,
    pub tested_bins: usize,
    pub skipped_bins: usize,
}

/// Sweep result: per-replication digests, the empirical error frequency,
/// and the verdict against the configured bound.
#[derive(Debug, Clone, Serialize)]
pub struct SimOutcome {
    pub mode: SweepMode,
    pub replications: Vec<SimReplication>,
    /// Fraction of replications where the mode's error event occurred.
    pub empirical_frequency: f64,
    /// Mean of the mode's configured bound across replications.
    pub bound_mean: f64,
    pub bound_max: f64,
    /// `3·sqrt(bound_mean·(1−bound_mean)/R)`.
    pub margin_3sigma: f64,
    /// `empirical_frequency ≤ bound_mean + margin_3sigma`.
    pub pass: bool,
    /// Warnings from the first replication (identical configs produce
    /// identical warnings).
    pub warnings: Vec<String>,
}

fn digest(index: usize, seed: u64, report: &CIReport) -> SimReplication {
    SimReplication {
        index,
        seed,
        reject: report.reject,
        type1_total: report.type1_total,
        type2_total: report.type2_total,
        tested_bins: report.tested_bins,
        skipped_bins: report.skipped_bins,
    }
}

/// Runs the sweep; any replication error aborts the whole sweep.
pub fn run_sweep(config: &SimConfig) -> Result<SimOutcome> {
    if config.replications == 0 {
        return Err(Error::InvalidParameter(
            "replications must be ≥ 1".to_string(),
        ));
    }
    let indices: Vec<usize> = (0..config.replications).collect();
    let outcomes: Vec<Result<(SimReplication, Vec<String>)>> =
        ordered_parallel_map(indices, move |r| {
            let seed = config.seed + r as u64;
            let mut scenario = config.scenario.clone();
            scenario.seed = seed;
            let mut test = config.test.clone();
            test.seed = seed;
            let data = generate(&scenario)?;
            let report = run_ci_test(&data, &test)?;
            Ok((digest(r, seed, &report), report.warnings))
        });

    let mut replications = Vec::with_capacity(config.replications);
    let mut warnings = Vec::new();
    for outcome in outcomes {
        let (rep, warns) = outcome?;
        if replications.is_empty() {
            warnings = warns;
        }
        replications.push(rep);
    }

    let r = replications.len() as f64;
    let errors = replications
        .iter()
        .filter(|rep| match config.mode {
            SweepMode::Type1 => rep.reject,
            SweepMode::Type2 => !rep.reject,
        })
        .count();
    let bound_of = |rep: &SimReplication| match config.mode {
        SweepMode::Type1 => rep.type1_total,
        SweepMode::Type2 => rep.type2_total,
    };
    let bound_mean = replications.iter().map(bound_of).sum::<f64>() / r;
    let bound_max = replications
        .iter()
        .map(bound_of)
        .fold(f64::NEG_INFINITY, f64::max);
    let empirical_frequency = errors as f64 / r;
    let margin_3sigma = 3.0 * (bound_mean * (1.0 - bound_mean) / r).max(0.0).sqrt();
    Ok(SimOutcome {
        mode: config.mode,
        replications,
        empirical_frequency,
        bound_mean,
        bound_max,
        margin_3sigma,
        pass: empirical_frequency <= bound_mean + margin_3sigma,
        warnings,
    })
}
