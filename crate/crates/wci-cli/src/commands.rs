//! Subcommand argument definitions and handlers.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use wci_core::binning::LipschitzConstants;
use wci_core::bounds::{
    c_pq, concentration_bounded, concentration_unbounded, covering_number_unit_square,
    min_samples_2d, min_samples_d3, solve_eps_bar, BoundParams,
};
use wci_core::ci::{run_ci_test, CIConfig, DeltaSpec};
use wci_core::datagen::{generate, ScenarioSpec};
use wci_core::lipschitz::{plugin_lipschitz, Target};
use wci_core::measures::{read_csv, write_csv, Dataset};
use wci_core::ot::{SolverChoice, SolverSettings};
use wci_core::sim::{run_sweep, SimConfig};
use wci_core::two_sample::{run_two_sample, TwoSampleSettings};

use crate::manifest::{Envelope, RunManifest};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    /// Exact below the cutoff, entropic above, closed form in 1-D.
    Auto,
    /// Always the transportation LP.
    Exact,
    /// Always Sinkhorn scaling with feasibility rounding.
    Entropic,
}

/// Transport-solver flags shared by the test commands.
#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::Auto)]
    pub solver: SolverKind,
    /// Largest atom count still sent to the exact solver under `auto`.
    #[arg(long, default_value_t = 512)]
    pub exact_cutoff: usize,
    /// Entropic regularization strength.
    #[arg(long, default_value_t = 0.05)]
    pub reg: f64,
    /// Entropic marginal tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Entropic iteration cap.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn settings(&self) -> SolverSettings {
        SolverSettings {
            method: match self.solver {
                SolverKind::Auto => SolverChoice::Auto,
                SolverKind::Exact => SolverChoice::Exact,
                SolverKind::Entropic => SolverChoice::Entropic,
            },
            exact_cutoff: self.exact_cutoff,
            reg: self.reg,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

/// Constants enabling the probability bounds; omit them all and the
/// reports mark every bound unavailable.
#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Support diameter of the joint sample (bounded-support route).
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Moment order for the moment-based routes (must exceed p).
    #[arg(long)]
    pub q: Option<f64>,
    /// q-th root-moment bound M_q.
    #[arg(long)]
    pub moment: Option<f64>,
    /// Truncation mass for the unbounded concentration chain, in (0, 1).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Ambient dimension of the joint sample; gates the mean-term checks.
    #[arg(long)]
    pub d: Option<usize>,
    /// Unspecified constant of the dimension-≥ 3 mean bound (default 1;
    /// results carry a warning when it matters).
    #[arg(long)]
    pub kappa: Option<f64>,
}

impl BoundArgs {
    fn params(&self, p: f64) -> Option<BoundParams> {
        if self.diameter.is_none()
            && self.q.is_none()
            && self.moment.is_none()
            && self.eta.is_none()
            && self.d.is_none()
            && self.kappa.is_none()
        {
            return None;
        }
        Some(BoundParams {
            q: self.q,
            d: self.d,
            diameter: self.diameter,
            moment: self.moment,
            eta: self.eta,
            kappa: self.kappa.unwrap_or(1.0),
            ..BoundParams::new(p)
        })
    }
}

fn load_dataset(manifest: &mut RunManifest, path: &PathBuf) -> Result<Dataset, CliError> {
    let bytes = manifest.ingest(path)?;
    read_csv(bytes.as_slice()).map_err(CliError::from)
}

#[derive(Debug, Args)]
pub struct TwoSampleArgs {
    /// CSV dataset with header x1..,y1..,z1..
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub p: f64,
    /// Rejection threshold ε₀.
    #[arg(long)]
    pub epsilon0: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Separation margin δ₀ for the Type II bound.
    #[arg(long)]
    pub delta0: Option<f64>,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn two_sample(args: &TwoSampleArgs) -> Result<(), CliError> {
    let settings = TwoSampleSettings {
        solver: args.solver.settings(),
        bound_params: args.bounds.params(args.p),
        delta0: args.delta0,
    };
    let config = json!({
        "p": args.p,
        "epsilon0": args.epsilon0,
        "settings": settings,
    });
    let mut manifest = RunManifest::new("two-sample", Some(args.seed), config);
    let data = load_dataset(&mut manifest, &args.data)?;
    let result = run_two_sample(&data, args.p, args.epsilon0, args.seed, &settings)?;
    Envelope::new(manifest, result).emit(args.out.as_deref())
}

#[derive(Debug, Args)]
pub struct CiTestArgs {
    /// CSV dataset with header x1..,y1..,z1..
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub p: f64,
    /// Global distance threshold ε.
    #[arg(long)]
    pub epsilon: f64,
    /// Separation margin δ broadcast to every tested bin.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Comma-separated per-bin margins (ascending cell order).
    #[arg(long, conflicts_with = "delta")]
    pub delta_list: Option<String>,
    /// Smoothness constant of z ↦ law(X | Z = z).
    #[arg(long = "Lx")]
    pub lx: Option<f64>,
    /// Smoothness constant of z ↦ law(Y | Z = z).
    #[arg(long = "Ly")]
    pub ly: Option<f64>,
    /// Smoothness constant of z ↦ law((X, Y) | Z = z).
    #[arg(long = "Lxy")]
    pub lxy: Option<f64>,
    /// Estimate the smoothness constants from the data on a coarse
    /// bootstrap grid instead of declaring them.
    #[arg(long, conflicts_with_all = ["lx", "ly", "lxy"])]
    pub estimate_lipschitz: bool,
    #[arg(long, default_value_t = 3)]
    pub min_bin_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bounding-box expansion when building the grid.
    #[arg(long, default_value_t = 0.0)]
    pub padding: f64,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Cells per axis of the bootstrap grid used by `--estimate-lipschitz`.
const BOOTSTRAP_CELLS_PER_AXIS: f64 = 4.0;

fn bootstrap_lipschitz(
    data: &Dataset,
    args: &CiTestArgs,
    solver: &SolverSettings,
) -> Result<(LipschitzConstants, serde_json::Value), CliError> {
    let z = data.z();
    let mut max_span = 0.0_f64;
    for axis in 0..data.d_z() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..data.n() {
            let v = z.row(i)[axis];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        max_span = max_span.max(hi - lo);
    }
    if !(max_span > 0.0) {
        return Err(CliError::input(
            "z has zero spread; cannot bootstrap a grid for --estimate-lipschitz",
        ));
    }
    let diameter = max_span / BOOTSTRAP_CELLS_PER_AXIS * (data.d_z() as f64).sqrt();
    let grid = wci_core::binning::build_grid(z, diameter, 0.0)?;
    let estimate = |target: Target| -> Result<wci_core::lipschitz::LipschitzEstimate, CliError> {
        Ok(plugin_lipschitz(data, &grid, target, args.p, args.min_bin_samples, solver)?
            .without_table())
    };
    let (ex, ey, exy) = (
        estimate(Target::X)?,
        estimate(Target::Y)?,
        estimate(Target::XY)?,
    );
    let derived = json!({
        "lipschitz_estimates": { "x": ex, "y": ey, "xy": exy },
        "bootstrap_cells": grid.total_cells(),
    });
    let constants = LipschitzConstants::new(ex.value, ey.value, exy.value)?;
    Ok((constants, derived))
}

pub fn ci_test(args: &CiTestArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("ci-test", Some(args.seed), serde_json::Value::Null);
    let data = load_dataset(&mut manifest, &args.data)?;

    let solver = args.solver.settings();
    let lipschitz = if args.estimate_lipschitz {
        let (constants, derived) = bootstrap_lipschitz(&data, args, &solver)?;
        manifest.derived = Some(derived);
        constants
    } else {
        match (args.lx, args.ly, args.lxy) {
            (Some(lx), Some(ly), Some(lxy)) => LipschitzConstants::new(lx, ly, lxy)?,
            _ => {
                return Err(CliError::input(
                    "provide --Lx, --Ly and --Lxy, or pass --estimate-lipschitz",
                ))
            }
        }
    };

    let delta = match (&args.delta, &args.delta_list) {
        (Some(d), None) => Some(DeltaSpec::Scalar(*d)),
        (None, Some(list)) => {
            let parsed: Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            Some(DeltaSpec::PerBin(parsed.map_err(|e| {
                CliError::input(format!("cannot parse --delta-list: {e}"))
            })?))
        }
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let config = CIConfig {
        p: args.p,
        eps: args.epsilon,
        delta,
        lipschitz,
        bound_params: args.bounds.params(args.p),
        min_bin_samples: args.min_bin_samples,
        seed: args.seed,
        solver,
        padding: args.padding,
    };
    manifest.config = serde_json::to_value(&config)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    let report = run_ci_test(&data, &config)?;
    Envelope::new(manifest, report).emit(args.out.as_deref())
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Tail bound on the deviation of the empirical transport cost.
    Concentration {
        #[arg(long)]
        n: u64,
        /// Deviation t on the p-th-power cost scale.
        #[arg(long)]
        t: f64,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Fixed point ε̄_n of the planar mean-deviation equation.
    EpsBar {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
    },
    /// Samples needed for the dimension-≥ 3 mean term at threshold eps.
    #[command(name = "min-n-d3")]
    MinND3 {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        moment: f64,
        /// Moment order; defaults to twice the smallest admissible value
        /// 2·d·p/(d − p) when omitted.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Samples needed for the planar mean term at threshold eps.
    #[command(name = "min-n-2d")]
    MinN2d {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        p: f64,
    },
    /// The moment-route constant c_pq.
    CPq {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
    },
    /// Covering-number bound for the unit square at radius eps.
    Covering {
        #[arg(long)]
        eps: f64,
    },
}

pub fn bounds(cmd: &BoundsCommand, out: Option<&PathBuf>) -> Result<(), CliError> {
    let (name, report) = match cmd {
        BoundsCommand::Concentration { n, t, p, bounds } => {
            let both = bounds.diameter.is_some()
                && (bounds.q.is_some() || bounds.moment.is_some() || bounds.eta.is_some());
            if both {
                return Err(CliError::input(
                    "choose either --diameter (bounded support) or the --q/--moment/--eta \
                     chain (unbounded support), not both",
                ));
            }
            let value = if let Some(diameter) = bounds.diameter {
                concentration_bounded(*n, *t, diameter, *p)?
            } else {
                let params = bounds.params(*p).ok_or_else(|| {
                    CliError::input(
                        "concentration needs --diameter, or --q with --moment and --eta",
                    )
                })?;
                concentration_unbounded(*n, *t, &params)?
            };
            (
                "bounds concentration",
                json!({
                    "inputs": { "n": n, "t": t, "p": p, "diameter": bounds.diameter,
                                "q": bounds.q, "moment": bounds.moment, "eta": bounds.eta },
                    "bound": value,
                }),
            )
        }
        BoundsCommand::EpsBar { n, p } => {
            let solve = solve_eps_bar(*n, *p)?;
            (
                "bounds eps-bar",
                json!({
                    "inputs": { "n": n, "p": p },
                    "eps_bar": solve.eps_bar,
                    "residual": solve.residual,
                }),
            )
        }
        BoundsCommand::MinND3 {
            eps,
            p,
            d,
            kappa,
            moment,
            q,
        } => {
            let q_min = *d as f64 * p / (*d as f64 - p);
            let q_eff = q.unwrap_or(2.0 * q_min);
            let params = BoundParams {
                q: Some(q_eff),
                d: Some(*d),
                kappa: *kappa,
                ..BoundParams::new(*p)
            };
            let n = min_samples_d3(*eps, &params, *moment)?;
            (
                "bounds min-n-d3",
                json!({
                    "inputs": { "eps": eps, "p": p, "d": d, "kappa": kappa,
                                "moment": moment, "q": q_eff, "q_defaulted": q.is_none() },
                    "min_samples": n,
                }),
            )
        }
        BoundsCommand::MinN2d { eps, p } => {
            let n = min_samples_2d(*eps, *p)?;
            (
                "bounds min-n-2d",
                json!({ "inputs": { "eps": eps, "p": p }, "min_samples": n }),
            )
        }
        BoundsCommand::CPq { p, q } => {
            let value = c_pq(*p, *q)?;
            (
                "bounds c-pq",
                json!({ "inputs": { "p": p, "q": q }, "c_pq": value }),
            )
        }
        BoundsCommand::Covering { eps } => {
            let value = covering_number_unit_square(*eps)?;
            (
                "bounds covering",
                json!({ "inputs": { "eps": eps }, "covering_number": value }),
            )
        }
    };
    let manifest = RunManifest::new(name, None, report["inputs"].clone());
    Envelope::new(manifest, report).emit(out.as_ref().map(|p| p.as_path()))
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sweep configuration JSON (mode, scenario, test, replications, seed).
    #[arg(long)]
    pub config: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("simulate", None, serde_json::Value::Null);
    let bytes = manifest.ingest(&args.config)?;
    let config: SimConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::input(format!("invalid sweep config: {e}")))?;
    manifest.seed = Some(config.seed);
    manifest.config = serde_json::to_value(&config)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    let outcome = run_sweep(&config)?;
    Envelope::new(manifest, outcome).emit(args.out.as_deref())
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Scenario description JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Destination CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("gen", None, serde_json::Value::Null);
    let bytes = manifest.ingest(&args.scenario)?;
    let spec: ScenarioSpec = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::input(format!("invalid scenario: {e}")))?;
    manifest.seed = Some(spec.seed);
    manifest.config = serde_json::to_value(&spec)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    let data = generate(&spec)?;
    let file = std::fs::File::create(&args.out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", args.out.display())))?;
    write_csv(&data, file)?;
    let report = json!({
        "rows": data.n(),
        "d_x": data.d_x(),
        "d_y": data.d_y(),
        "d_z": data.d_z(),
        "out": args.out.display().to_string(),
    });
    Envelope::new(manifest, report).emit(args.summary.as_deref())
}
