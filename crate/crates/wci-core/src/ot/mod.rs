//! p-Wasserstein distances between discrete measures.
//!
//! Three routes are provided:
//! - [`wasserstein_exact`]: the transportation linear program on the dense
//!   bipartite graph, solved by a network simplex method — the oracle that
//!   anchors every statistical guarantee in this crate;
//! - [`wasserstein_1d`] / [`wasserstein_1d_general`]: closed forms for
//!   one-dimensional measures (sorted pairing for uniform equal-size
//!   samples, quantile-function coupling in general);
//! - [`wasserstein_entropic`]: Sinkhorn matrix scaling with a final
//!   feasibility-rounding step, for atom counts where the exact solver is
//!   too slow.
//!
//! Costs are powers of the Euclidean norm, `c_ij = ‖x_i − y_j‖^p`. Reported
//! distances are the `p`-th root of the optimal (or rounded-feasible) cost.

pub(crate) mod entropic;
pub(crate) mod one_dim;
pub(crate) mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::tols::MARGINAL_TOL;

/// Which solver produced a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "oneD")]
    OneD,
    #[serde(rename = "entropic")]
    Entropic,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::OneD => "oneD",
            Method::Entropic => "entropic",
        })
    }
}

/// A coupling between two discrete measures, stored as a dense row-major
/// `rows × cols` mass matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportPlan {
    pub rows: usize,
    pub cols: usize,
    /// Row-major mass matrix; entry `(i, j)` lives at `i * cols + j`.
    pub mass: Vec<f64>,
}

impl TransportPlan {
    fn zeros(rows: usize, cols: usize) -> Self {
        TransportPlan {
            rows,
            cols,
            mass: vec![0.0; rows * cols],
        }
    }

    fn from_sparse(rows: usize, cols: usize, entries: &[(u32, u32, f64)]) -> Self {
        let mut plan = TransportPlan::zeros(rows, cols);
        for &(i, j, f) in entries {
            plan.mass[i as usize * cols + j as usize] = f;
        }
        plan
    }

    /// Mass routed from source atom `i` to target atom `j`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.cols + j]
    }

    /// Checks the coupling invariants: nonnegative entries, row sums equal
    /// to the source weights and column sums equal to the target weights
    /// within 1e-9.
    pub fn validate(&self, source_weights: &[f64], target_weights: &[f64]) -> Result<()> {
        if source_weights.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: source_weights.len(),
                context: "source weights".into(),
            });
        }
        if target_weights.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: target_weights.len(),
                context: "target weights".into(),
            });
        }
        let mut col_sum = vec![0.0; self.cols];
        for i in 0..self.rows {
            let mut row_sum = 0.0;
            for j in 0..self.cols {
                let m = self.entry(i, j);
                if m < 0.0 {
                    return Err(Error::Numerical(format!(
                        "transport plan entry ({i}, {j}) is negative: {m}"
                    )));
                }
                row_sum += m;
                col_sum[j] += m;
            }
            if (row_sum - source_weights[i]).abs() > MARGINAL_TOL {
                return Err(Error::Numerical(format!(
                    "transport plan row {i} sums to {row_sum}, expected {}",
                    source_weights[i]
                )));
            }
        }
        for (j, (&got, &want)) in col_sum.iter().zip(target_weights).enumerate() {
            if (got - want).abs() > MARGINAL_TOL {
                return Err(Error::Numerical(format!(
                    "transport plan column {j} sums to {got}, expected {want}"
                )));
            }
        }
        Ok(())
    }
}

/// A computed Wasserstein distance together with the plan that realizes it.
#[derive(Debug, Clone, Serialize)]
pub struct OTResult {
    /// W_p: the p-th root of `cost`.
    pub distance: f64,
    /// Optimal (or rounded-feasible) transport cost Σ γ_ij ‖x_i − y_j‖^p.
    pub cost: f64,
    pub plan: TransportPlan,
    pub method: Method,
    /// Scaling sweeps performed (0 for the direct methods).
    pub iterations: usize,
    /// False only when the entropic iteration hit its cap before reaching
    /// the marginal tolerance; the reported plan is feasible regardless.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Solver selection for callers that do not want to choose per call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// 1-D closed form when applicable, exact up to `exact_cutoff` atoms,
    /// entropic beyond.
    Auto,
    /// Always the transportation LP.
    Exact,
    /// Always Sinkhorn scaling with feasibility rounding.
    Entropic,
}

/// Tuning knobs for [`wasserstein_auto`] and everything built on top of it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub method: SolverChoice,
    /// Largest per-side atom count still sent to the exact solver under
    /// [`SolverChoice::Auto`].
    pub exact_cutoff: usize,
    /// Entropic regularization strength.
    pub reg: f64,
    /// Entropic stopping tolerance on the marginal violation.
    pub tol: f64,
    /// Entropic iteration cap; hitting it sets a warning, not an error.
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            method: SolverChoice::Auto,
            exact_cutoff: 512,
            reg: 0.05,
            tol: 1e-6,
            max_iter: 10_000,
        }
    }
}

fn check_pair(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: nu.dim(),
            context: "target measure dimension".into(),
        });
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    Ok(())
}

/// Dense cost matrix c_ij = ‖x_i − y_j‖^p.
fn cost_matrix(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Vec<f64> {
    let n = mu.len();
    let m = nu.len();
    let mut cost = vec![0.0; n * m];
    for i in 0..n {
        let xi = mu.point(i);
        for j in 0..m {
            let yj = nu.point(j);
            let mut d2 = 0.0;
            for (a, b) in xi.iter().zip(yj) {
                let diff = a - b;
                d2 += diff * diff;
            }
            cost[i * m + j] = if p == 1.0 {
                d2.sqrt()
            } else if p == 2.0 {
                d2
            } else {
                d2.sqrt().powf(p)
            };
        }
    }
    cost
}

fn p_root(cost: f64, p: f64) -> f64 {
    let c = cost.max(0.0);
    if p == 1.0 {
        c
    } else if p == 2.0 {
        c.sqrt()
    } else {
        c.powf(1.0 / p)
    }
}

/// Exact p-Wasserstein distance via the transportation linear program.
pub fn wasserstein_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<OTResult> {
    check_pair(mu, nu, p)?;
    let cost = cost_matrix(mu, nu, p);
    let sol = simplex::solve_transportation(&cost, mu.weights(), nu.weights())?;
    Ok(OTResult {
        distance: p_root(sol.cost, p),
        cost: sol.cost,
        plan: TransportPlan::from_sparse(mu.len(), nu.len(), &sol.plan),
        method: Method::Exact,
        iterations: 0,
        converged: true,
        warning: None,
    })
}

/// Closed-form 1-D distance for two uniform samples of equal size: sort both
/// atom lists and average `|x_(i) − y_(i)|^p`. Anything outside that narrow
/// case is rejected so this path can serve as an independent cross-check of
/// the LP solver.
pub fn wasserstein_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    check_pair(mu, nu, p)?;
    if mu.dim() != 1 {
        return Err(Error::OneDimFastPath {
            reason: format!("measures must be one-dimensional, got dimension {}", mu.dim()),
        });
    }
    if mu.len() != nu.len() {
        return Err(Error::OneDimFastPath {
            reason: format!("atom counts differ: {} vs {}", mu.len(), nu.len()),
        });
    }
    if !mu.is_uniform() || !nu.is_uniform() {
        return Err(Error::OneDimFastPath {
            reason: "weights must be uniform".into(),
        });
    }
    let xs: Vec<f64> = (0..mu.len()).map(|i| mu.point(i)[0]).collect();
    let ys: Vec<f64> = (0..nu.len()).map(|i| nu.point(i)[0]).collect();
    Ok(p_root(one_dim::sorted_uniform_cost(&xs, &ys, p), p))
}

/// General 1-D distance for arbitrary weights and atom counts, computed by
/// coupling the two quantile functions.
pub fn wasserstein_1d_general(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<f64> {
    check_pair(mu, nu, p)?;
    if mu.dim() != 1 {
        return Err(Error::OneDimFastPath {
            reason: format!("measures must be one-dimensional, got dimension {}", mu.dim()),
        });
    }
    let xs: Vec<f64> = (0..mu.len()).map(|i| mu.point(i)[0]).collect();
    let ys: Vec<f64> = (0..nu.len()).map(|i| nu.point(i)[0]).collect();
    let (cost, _) = one_dim::quantile_cost(&xs, mu.weights(), &ys, nu.weights(), p);
    Ok(p_root(cost, p))
}

/// Entropy-regularized distance with feasibility rounding. The returned
/// cost always belongs to an exactly feasible plan, so it upper-bounds the
/// true optimum; if the iteration cap is hit first, the result carries a
/// warning instead of failing.
pub fn wasserstein_entropic(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    reg: f64,
    tol: f64,
    max_iter: usize,
) -> Result<OTResult> {
    check_pair(mu, nu, p)?;
    let cost = cost_matrix(mu, nu, p);
    let out = entropic::sinkhorn_rounded(
        &cost,
        mu.weights(),
        nu.weights(),
        reg,
        tol,
        max_iter,
        true,
    )?;
    let warning = if out.converged {
        None
    } else {
        Some(format!(
            "entropic scaling stopped at the iteration cap ({max_iter}) before reaching \
             tolerance {tol}; the reported cost is still that of a feasible plan"
        ))
    };
    Ok(OTResult {
        distance: p_root(out.cost, p),
        cost: out.cost,
        plan: TransportPlan {
            rows: mu.len(),
            cols: nu.len(),
            mass: out.plan.expect("plan requested"),
        },
        method: Method::Entropic,
        iterations: out.iterations,
        converged: out.converged,
        warning,
    })
}

/// Dispatches to the cheapest adequate solver per [`SolverSettings`].
pub fn wasserstein_auto(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    settings: &SolverSettings,
) -> Result<OTResult> {
    check_pair(mu, nu, p)?;
    match settings.method {
        SolverChoice::Exact => wasserstein_exact(mu, nu, p),
        SolverChoice::Entropic => wasserstein_entropic(
            mu,
            nu,
            p,
            settings.reg,
            settings.tol,
            settings.max_iter,
        ),
        SolverChoice::Auto => {
            if mu.len().max(nu.len()) <= settings.exact_cutoff {
                wasserstein_exact(mu, nu, p)
            } else {
                wasserstein_entropic(mu, nu, p, settings.reg, settings.tol, settings.max_iter)
            }
        }
    }
}

/// Distance-only variant of [`wasserstein_auto`] for hot paths that never
/// look at the plan; additionally routes one-dimensional uniform inputs to
/// the closed form. Returns the distance, the method used, and an optional
/// warning.
pub(crate) fn distance_auto(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    settings: &SolverSettings,
) -> Result<(f64, Method, Option<String>)> {
    check_pair(mu, nu, p)?;
    if settings.method == SolverChoice::Auto
        && mu.dim() == 1
        && mu.is_uniform()
        && nu.is_uniform()
    {
        let d = if mu.len() == nu.len() {
            wasserstein_1d(mu, nu, p)?
        } else {
            wasserstein_1d_general(mu, nu, p)?
        };
        return Ok((d, Method::OneD, None));
    }
    let use_exact = match settings.method {
        SolverChoice::Exact => true,
        SolverChoice::Entropic => false,
        SolverChoice::Auto => mu.len().max(nu.len()) <= settings.exact_cutoff,
    };
    if use_exact {
        let cost = cost_matrix(mu, nu, p);
        let sol = simplex::solve_transportation(&cost, mu.weights(), nu.weights())?;
        Ok((p_root(sol.cost, p), Method::Exact, None))
    } else {
        let cost = cost_matrix(mu, nu, p);
        let out = entropic::sinkhorn_rounded(
            &cost,
            mu.weights(),
            nu.weights(),
            settings.reg,
            settings.tol,
            settings.max_iter,
            false,
        )?;
        let warning = if out.converged {
            None
        } else {
            Some(format!(
                "entropic scaling stopped at the iteration cap ({}) before reaching tolerance {}",
                settings.max_iter, settings.tol
            ))
        };
        Ok((p_root(out.cost, p), Method::Entropic, warning))
    }
}

/// Numeric check of the mixture inequality
/// `W_p^p(Σ λ_z μ_z, ν) ≤ Σ λ_z W_p^p(μ_z, ν)`:
/// returns `(lhs, rhs)` on the p-th-power cost scale, both from the exact
/// solver.
pub fn mixture_bound_gap(
    components: &[DiscreteMeasure],
    lambda: &[f64],
    reference: &DiscreteMeasure,
    p: f64,
) -> Result<(f64, f64)> {
    if components.is_empty() {
        return Err(Error::EmptySample);
    }
    if lambda.len() != components.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            found: lambda.len(),
            context: "mixture weights".into(),
        });
    }
    let lsum: f64 = lambda.iter().sum();
    if lambda.iter().any(|&l| !(l >= 0.0) || !l.is_finite())
        || (lsum - 1.0).abs() > crate::tols::WEIGHT_SUM_TOL
    {
        return Err(Error::InvalidParameter(format!(
            "mixture weights must be a probability vector; they sum to {lsum}"
        )));
    }
    for c in components {
        if c.dim() != reference.dim() {
            return Err(Error::DimensionMismatch {
                expected: reference.dim(),
                found: c.dim(),
                context: "mixture component dimension".into(),
            });
        }
    }

    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (comp, &l) in components.iter().zip(lambda) {
        for i in 0..comp.len() {
            points.push(comp.point(i).to_vec());
            weights.push(l * comp.weight(i));
        }
    }
    let mixture = DiscreteMeasure::new(crate::measures::Matrix::from_rows(&points)?, weights)?;

    let lhs = wasserstein_exact(&mixture, reference, p)?.cost;
    let mut rhs = 0.0;
    for (comp, &l) in components.iter().zip(lambda) {
        if l == 0.0 {
            continue;
        }
        rhs += l * wasserstein_exact(comp, reference, p)?.cost;
    }
    Ok((lhs, rhs))
}
