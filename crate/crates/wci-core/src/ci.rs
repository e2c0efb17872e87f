//! The conditional-independence test: per-bin two-sample tests plus
//! finite-sample error aggregation.
//!
//! Pipeline: the conditioning space is cut into cells whose diameter keeps
//! the binning error below ε/2 (from the supplied smoothness constants);
//! every sufficiently populated cell runs the split two-sample test on its
//! own rows against the threshold ε; the test rejects conditional
//! independence as soon as any tested cell does. Per-cell false-rejection
//! bounds sum into a global Type I bound (clamped at 1); per-cell
//! false-acceptance bounds multiply into a global Type II bound.
//!
//! Cells below the sample floor are excluded from the decision and from
//! both aggregates, and loudly reported: silently including an untestable
//! cell would invalidate the guarantees. Tested cells whose bound is
//! unavailable contribute the trivial factor 1 instead.
//!
//! The product aggregation assumes the per-cell acceptance events are
//! independent; the report carries that caveat verbatim, because the
//! aggregate is implemented exactly as stated.

use serde::{Deserialize, Serialize};

use crate::binning::{assign, build_grid, required_diameter, BinGrid, LipschitzConstants};
use crate::bounds::{self, BoundParams};
use crate::error::{Error, Result};
use crate::measures::{split_for_independence, Dataset};
use crate::ot::{distance_auto, Method, SolverSettings};
use crate::parallel::ordered_parallel_map;
use crate::two_sample::{expectation_gate, kappa_warning, type2_bound_inner, BoundOutcome, Gate};

/// Separation margins for the Type II bounds: one value broadcast to every
/// tested bin, or an explicit per-bin list (matched against tested bins in
/// ascending cell order).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Scalar(f64),
    PerBin(Vec<f64>),
}

/// Full configuration of a conditional-independence run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CIConfig {
    pub p: f64,
    /// Global distance threshold ε.
    pub eps: f64,
    /// Separation margins δ_j (each must exceed ε/2); absent means no
    /// Type II bounds are requested.
    #[serde(default)]
    pub delta: Option<DeltaSpec>,
    /// Smoothness constants fixing the cell diameter.
    pub lipschitz: LipschitzConstants,
    /// Constants for the probability bounds; absent means every per-bin
    /// bound reports unavailable.
    #[serde(default)]
    pub bound_params: Option<BoundParams>,
    /// Minimum rows a cell needs to be tested (≥ 3, the split minimum).
    pub min_bin_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Bounding-box expansion applied when building the grid.
    #[serde(default)]
    pub padding: f64,
}

impl CIConfig {
    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p must be ≥ 1, got {}",
                self.p
            )));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be > 0, got {}",
                self.eps
            )));
        }
        if self.min_bin_samples < 3 {
            return Err(Error::InvalidParameter(format!(
                "min_bin_samples must be ≥ 3, got {}",
                self.min_bin_samples
            )));
        }
        if let Some(spec) = &self.delta {
            let check = |d: f64| -> Result<()> {
                if !(d > self.eps / 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "delta must exceed eps/2 = {} where Type II bounds are requested, \
                         got {d}",
                        self.eps / 2.0
                    )));
                }
                Ok(())
            };
            match spec {
                DeltaSpec::Scalar(d) => check(*d)?,
                DeltaSpec::PerBin(list) => {
                    for &d in list {
                        check(d)?;
                    }
                }
            }
        }
        if let Some(params) = &self.bound_params {
            params.validate()?;
            if params.p != self.p {
                return Err(Error::InvalidParameter(format!(
                    "bound parameters use p = {} but the test runs p = {}",
                    params.p, self.p
                )));
            }
        }
        if !(self.padding >= 0.0) || !self.padding.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "padding must be ≥ 0, got {}",
                self.padding
            )));
        }
        Ok(())
    }
}

/// Outcome of one cell: either a completed two-sample test or a skip record.
#[derive(Debug, Clone, Serialize)]
pub struct BinRecord {
    /// Linear cell id in the grid.
    pub cell: usize,
    pub multi_index: Vec<usize>,
    /// Rows that landed in the cell.
    pub n_rows: usize,
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    /// Atoms per side after the split (absent when skipped).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_per_side: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// The decision threshold ε (same for every cell).
    pub threshold: f64,
    /// `distance ≥ threshold`; always false for skipped cells.
    pub reject: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type1_bound: Option<BoundOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type2_bound: Option<BoundOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
}

/// Full result of a conditional-independence run.
#[derive(Debug, Clone, Serialize)]
pub struct CIReport {
    pub grid: BinGrid,
    pub bins: Vec<BinRecord>,
    /// Global decision: some tested cell rejected.
    pub reject: bool,
    /// Σ of per-cell false-rejection bounds over tested cells, clamped to 1
    /// (unavailable bounds count as 1).
    pub type1_total: f64,
    /// Π of per-cell false-acceptance bounds over tested cells
    /// (unavailable bounds count as 1).
    pub type2_total: f64,
    /// Caveat attached to `type2_total`.
    pub type2_aggregation_note: String,
    pub tested_bins: usize,
    pub skipped_bins: usize,
    /// Rows in skipped cells (excluded from every decision and aggregate).
    pub skipped_rows: usize,
    pub warnings: Vec<String>,
}

/// Bonferroni-style union bound: `min(1, Σ values)`; an empty list is 0.
pub fn aggregate_type1(per_bin: &[f64]) -> f64 {
    per_bin.iter().sum::<f64>().min(1.0)
}

/// Product bound: `Π values`; an empty list is 1 (vacuous alternative).
pub fn aggregate_type2(per_bin: &[f64]) -> f64 {
    per_bin.iter().product()
}

const PER_BIN_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

fn bin_seed(base: u64, cell: usize) -> u64 {
    base ^ PER_BIN_SEED_STRIDE.wrapping_mul(cell as u64 + 1)
}

/// Margins assigned to the tested cells, in ascending cell order.
fn resolve_deltas(spec: &Option<DeltaSpec>, tested: usize) -> Result<Vec<Option<f64>>> {
    match spec {
        None => Ok(vec![None; tested]),
        Some(DeltaSpec::Scalar(d)) => Ok(vec![Some(*d); tested]),
        Some(DeltaSpec::PerBin(list)) => {
            if list.len() != tested {
                return Err(Error::InvalidParameter(format!(
                    "per-bin delta list has {} entries but {tested} bins are testable",
                    list.len()
                )));
            }
            Ok(list.iter().map(|&d| Some(d)).collect())
        }
    }
}

/// Per-cell false-rejection bound `p_j`: the two-sample null bound at ε/2 —
/// under the null, the binned population distance is at most ε/2, so an
/// empirical distance reaching ε needs a two-sample deviation of ε/2. The
/// availability gate is the mean-term budget ½(ε/4)^p, reached through the
/// planar calculator at margin ε (its convention divides by 4) and through
/// the d ≥ 3 half-budget at margin ε/2.
fn per_bin_type1(
    k: u64,
    eps: f64,
    params: &BoundParams,
) -> Result<(BoundOutcome, Option<String>)> {
    let Some(diameter) = params.diameter else {
        return Ok((
            BoundOutcome::Unavailable(
                "support diameter unknown (per-bin bounds use the bounded-support chain)".into(),
            ),
            None,
        ));
    };
    let raw = bounds::two_sample_null_bound(k, eps / 2.0, diameter, params.p)?;
    let gate_margin = if params.d == Some(2) { eps } else { eps / 2.0 };
    Ok(match expectation_gate(k, gate_margin, params) {
        Gate::Pass => (BoundOutcome::Available(raw), None),
        Gate::Fail(msg) => (BoundOutcome::Unavailable(msg), None),
        Gate::Unverifiable(msg) => (
            BoundOutcome::Available(raw),
            Some(format!("type1 bound reported unverified: {msg}")),
        ),
    })
}

/// Runs the conditional-independence test.
pub fn run_ci_test(data: &Dataset, config: &CIConfig) -> Result<CIReport> {
    config.validate()?;
    let diameter = required_diameter(config.eps, config.p, &config.lipschitz)?;
    let grid = build_grid(data.z(), diameter, config.padding)?;
    let bins = assign(data, &grid)?;

    let mut testable: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut skipped: Vec<BinRecord> = Vec::new();
    let mut largest = 0usize;
    let mut skipped_rows = 0usize;
    for (cell, rows) in &bins {
        largest = largest.max(rows.len());
        if rows.len() >= config.min_bin_samples {
            testable.push((*cell, rows.clone()));
        } else {
            skipped_rows += rows.len();
            skipped.push(BinRecord {
                cell: *cell,
                multi_index: grid.multi_index(*cell),
                n_rows: rows.len(),
                skipped: true,
                skip_reason: Some(format!(
                    "{} rows < min_bin_samples = {}",
                    rows.len(),
                    config.min_bin_samples
                )),
                n_per_side: None,
                distance: None,
                threshold: config.eps,
                reject: false,
                delta: None,
                type1_bound: None,
                type2_bound: None,
                method: None,
            });
        }
    }
    if testable.is_empty() {
        return Err(Error::NoTestableBins {
            min_bin_samples: config.min_bin_samples,
            largest,
        });
    }

    let deltas = resolve_deltas(&config.delta, testable.len())?;
    let mut warnings: Vec<String> = Vec::new();
    if let Some(params) = &config.bound_params {
        kappa_warning(params, &mut warnings);
        if params.d == Some(2) {
            let note = "planar mean-term gates assume the joint (x, y) sample lives in the \
                        unit square"
                .to_string();
            warnings.push(note);
        }
    }

    let jobs: Vec<(usize, Vec<usize>, Option<f64>)> = testable
        .into_iter()
        .zip(deltas)
        .map(|((cell, rows), delta)| (cell, rows, delta))
        .collect();
    let grid_ref = &grid;
    let outcomes: Vec<Result<(BinRecord, Vec<String>)>> =
        ordered_parallel_map(jobs, move |(cell, rows, delta)| {
            run_one_bin(data, config, grid_ref, cell, &rows, delta)
        });

    let mut records = Vec::new();
    for outcome in outcomes {
        let (record, warns) = outcome?;
        warnings.extend(warns);
        records.push(record);
    }

    let reject = records.iter().any(|r| r.reject);
    let type1_values: Vec<f64> = records
        .iter()
        .filter_map(|r| r.type1_bound.as_ref().map(BoundOutcome::value_or_one))
        .collect();
    let type2_values: Vec<f64> = records
        .iter()
        .filter_map(|r| r.type2_bound.as_ref().map(BoundOutcome::value_or_one))
        .collect();
    let type1_total = aggregate_type1(&type1_values);
    let type2_total = aggregate_type2(&type2_values);

    let tested_bins = records.len();
    let skipped_bins = skipped.len();
    records.extend(skipped);
    records.sort_by_key(|r| r.cell);

    Ok(CIReport {
        grid,
        bins: records,
        reject,
        type1_total,
        type2_total,
        type2_aggregation_note: "product of per-bin acceptance bounds, as stated; assumes \
                                 independence of per-bin acceptance events"
            .to_string(),
        tested_bins,
        skipped_bins,
        skipped_rows,
        warnings,
    })
}

fn run_one_bin(
    data: &Dataset,
    config: &CIConfig,
    grid: &BinGrid,
    cell: usize,
    rows: &[usize],
    delta: Option<f64>,
) -> Result<(BinRecord, Vec<String>)> {
    let sub = data.subset(rows)?;
    let split = split_for_independence(&sub, bin_seed(config.seed, cell))?;
    let k = split.k();
    let (distance, method, solver_warning) =
        distance_auto(split.joint(), split.product(), config.p, &config.solver)?;
    let mut warnings = Vec::new();
    if let Some(w) = solver_warning {
        warnings.push(format!("bin {cell}: {w}"));
    }

    let (type1_bound, type2_bound) = if k == 1 {
        let why = "degenerate split (k = 1): single-atom empiricals carry no concentration"
            .to_string();
        (
            BoundOutcome::Unavailable(why.clone()),
            BoundOutcome::Unavailable(why),
        )
    } else if let Some(params) = &config.bound_params {
        let (t1, warn1) = per_bin_type1(k as u64, config.eps, params)?;
        if let Some(w) = warn1 {
            warnings.push(format!("bin {cell}: {w}"));
        }
        let t2 = match delta {
            Some(delta_j) => {
                let delta0 = delta_j - config.eps / 2.0;
                let (t2, warn2) = type2_bound_inner(delta0, k as u64, params)?;
                if let Some(w) = warn2 {
                    warnings.push(format!("bin {cell}: {w}"));
                }
                t2
            }
            None => BoundOutcome::Unavailable("no separation margin supplied".into()),
        };
        (t1, t2)
    } else {
        (
            BoundOutcome::Unavailable("no bound parameters supplied".into()),
            BoundOutcome::Unavailable("no bound parameters supplied".into()),
        )
    };

    Ok((
        BinRecord {
            cell,
            multi_index: grid.multi_index(cell),
            n_rows: rows.len(),
            skipped: false,
            skip_reason: None,
            n_per_side: Some(k),
            distance: Some(distance),
            threshold: config.eps,
            reject: distance >= config.eps,
            delta,
            type1_bound: Some(type1_bound),
            type2_bound: Some(type2_bound),
            method: Some(method),
        },
        warnings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Matrix;

    fn dataset(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Dataset {
        let n = x.len();
        Dataset::new(
            Matrix::from_flat(x, n, 1).unwrap(),
            Matrix::from_flat(y, n, 1).unwrap(),
            Matrix::from_flat(z, n, 1).unwrap(),
        )
        .unwrap()
    }

    fn base_config() -> CIConfig {
        CIConfig {
            p: 1.0,
            eps: 0.4,
            delta: None,
            lipschitz: LipschitzConstants::new(0.0, 0.0, 1.0).unwrap(),
            bound_params: None,
            min_bin_samples: 3,
            seed: 42,
            solver: SolverSettings::default(),
            padding: 0.0,
        }
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_type1(&[]), 0.0);
        assert!((aggregate_type1(&[0.1, 0.2]) - 0.3).abs() < 1e-15);
        assert_eq!(aggregate_type1(&[0.7, 0.7]), 1.0);
        assert_eq!(aggregate_type2(&[]), 1.0);
        assert!((aggregate_type2(&[0.1, 0.2]) - 0.02).abs() < 1e-15);
        assert!((aggregate_type2(&[1.0, 0.37]) - 0.37).abs() < 1e-15);
        // Adding a bin never helps either aggregate.
        assert!(aggregate_type1(&[0.1, 0.05]) >= aggregate_type1(&[0.1]));
        assert!(aggregate_type2(&[0.5, 0.9]) <= aggregate_type2(&[0.5]));
    }

    #[test]
    fn config_validation() {
        let mut cfg = base_config();
        cfg.min_bin_samples = 2;
        assert!(run_ci_test(&dataset(vec![0.0; 9], vec![0.0; 9], vec![0.0; 9]), &cfg)
            .unwrap_err()
            .to_string()
            .contains("min_bin_samples"));

        let mut cfg = base_config();
        cfg.delta = Some(DeltaSpec::Scalar(0.2)); // not > eps/2 = 0.2
        assert!(run_ci_test(&dataset(vec![0.0; 9], vec![0.0; 9], vec![0.0; 9]), &cfg)
            .unwrap_err()
            .to_string()
            .contains("delta must exceed eps/2"));

        let mut cfg = base_config();
        cfg.eps = 0.0;
        assert!(run_ci_test(&dataset(vec![0.0; 9], vec![0.0; 9], vec![0.0; 9]), &cfg)
            .unwrap_err()
            .to_string()
            .contains("eps"));
    }

    #[test]
    fn single_bin_reduction() {
        // All z equal: one cell; the report is one two-sample test and the
        // Type I total equals its bound.
        let n = 60;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos().abs()).collect();
        let mut cfg = base_config();
        cfg.eps = 3.0;
        cfg.bound_params = Some(BoundParams {
            q: Some(10.0),
            d: Some(3),
            diameter: Some(2.0),
            moment: Some(1.0),
            ..BoundParams::new(1.0)
        });
        let report = run_ci_test(&dataset(x, y, vec![5.0; n]), &cfg).unwrap();
        assert_eq!(report.tested_bins, 1);
        assert_eq!(report.skipped_bins, 0);
        let record = &report.bins[0];
        let bound = record.type1_bound.as_ref().unwrap();
        assert!(bound.is_available());
        assert_eq!(report.type1_total, bound.value_or_one());
        assert_eq!(report.reject, record.reject);
        // No delta requested: the Type II total is the vacuous 1.
        assert_eq!(report.type2_total, 1.0);
    }

    #[test]
    fn no_testable_bins_is_the_infeasibility_error() {
        let mut cfg = base_config();
        cfg.min_bin_samples = 50;
        let err = run_ci_test(
            &dataset(vec![0.0; 20], vec![0.0; 20], vec![0.0; 20]),
            &cfg,
        )
        .unwrap_err();
        assert!(err.is_infeasible());
        let msg = err.to_string();
        assert!(msg.contains("no bin meets min_bin_samples"), "{msg}");
        assert!(msg.contains("largest bin has 20 rows"), "{msg}");
    }

    #[test]
    fn skipped_bins_are_reported_and_excluded() {
        // Cluster A: 40 rows near z=0; cluster B: 4 rows near z=1.
        // eps=0.4, L_xy=1 → diameter 0.1 → distinct cells; min 5 skips B.
        let mut x = vec![0.0; 44];
        let mut y = vec![0.0; 44];
        let mut z = vec![0.0; 44];
        for i in 0..44 {
            x[i] = (i as f64 * 0.17).sin();
            y[i] = (i as f64 * 0.29).cos();
            z[i] = if i < 40 { 0.001 * i as f64 } else { 1.0 };
        }
        let mut cfg = base_config();
        cfg.min_bin_samples = 5;
        let report = run_ci_test(&dataset(x, y, z), &cfg).unwrap();
        assert_eq!(report.tested_bins, 1);
        assert_eq!(report.skipped_bins, 1);
        assert_eq!(report.skipped_rows, 4);
        let skipped: Vec<_> = report.bins.iter().filter(|b| b.skipped).collect();
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].n_rows, 4);
        assert!(skipped[0]
            .skip_reason
            .as_deref()
            .unwrap()
            .contains("min_bin_samples"));
        assert!(skipped[0].distance.is_none());
        assert!(!skipped[0].reject);
    }

    #[test]
    fn per_bin_delta_list_must_match_tested_bins() {
        let n = 40;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * 0.01).collect();
        let y = x.clone();
        let z: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let mut cfg = base_config();
        cfg.delta = Some(DeltaSpec::PerBin(vec![0.9]));
        let err = run_ci_test(&dataset(x.clone(), y.clone(), z.clone()), &cfg)
            .unwrap_err()
            .to_string();
        assert!(err.contains("per-bin delta list"), "{err}");

        let mut cfg = base_config();
        cfg.delta = Some(DeltaSpec::PerBin(vec![0.9, 1.1]));
        let report = run_ci_test(&dataset(x, y, z), &cfg).unwrap();
        let tested: Vec<_> = report.bins.iter().filter(|b| !b.skipped).collect();
        assert_eq!(tested.len(), 2);
        assert_eq!(tested[0].delta, Some(0.9));
        assert_eq!(tested[1].delta, Some(1.1));
    }

    #[test]
    fn reports_are_deterministic() {
        let n = 80;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.619).fract()).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.367).fract()).collect();
        let z: Vec<f64> = (0..n).map(|i| (i as f64 * 0.243).fract()).collect();
        let mut cfg = base_config();
        cfg.eps = 2.0; // diameter 0.5 → a couple of cells
        let a = serde_json::to_string(&run_ci_test(&dataset(x.clone(), y.clone(), z.clone()), &cfg).unwrap())
            .unwrap();
        let b = serde_json::to_string(&run_ci_test(&dataset(x, y, z), &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
