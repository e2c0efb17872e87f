//! Entropy-regularized transportation: Sinkhorn scaling followed by a
//! rounding step that restores exact marginal feasibility.
//!
//! The scaling runs on the plain kernel `exp(−cost/reg)`; the regularization
//! strengths this crate uses keep `cost/reg` well inside f64 range, so the
//! log-domain variant is unnecessary. Whatever state the iteration reaches,
//! the result is pushed through the rounding scheme of Altschuler, Weed and
//! Rigollet, which projects the scaled kernel onto the transportation
//! polytope by row/column rescaling plus a rank-one correction. The returned
//! cost is therefore the objective of an exactly feasible plan — a true
//! upper bound on the optimum — whether or not the iteration converged.

use crate::error::{Error, Result};

/// Outcome of the entropic solve. `cost` is the objective of the rounded
/// (exactly feasible) plan; `converged` records whether the marginal
/// tolerance was met before the iteration cap.
#[derive(Debug)]
pub(crate) struct EntropicOutcome {
    pub cost: f64,
    pub plan: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

/// Runs Sinkhorn scaling on the `a.len() × b.len()` cost matrix and rounds
/// the result to exact feasibility. `tol` is the L∞ bound on the column
/// marginal violation used as the stopping rule.
pub(crate) fn sinkhorn_rounded(
    cost: &[f64],
    a: &[f64],
    b: &[f64],
    reg: f64,
    tol: f64,
    max_iter: usize,
    want_plan: bool,
) -> Result<EntropicOutcome> {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return Err(Error::EmptySample);
    }
    if cost.len() != n * m {
        return Err(Error::DimensionMismatch {
            expected: n * m,
            found: cost.len(),
            context: "cost matrix".into(),
        });
    }
    if !(reg > 0.0) || !reg.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "regularization must be a positive finite number, got {reg}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }

    // Kernel K = exp(−c/reg). Shift by the row minimum of the whole matrix
    // first: the scaling vectors absorb the constant, and the smallest
    // entries stay well above the underflow threshold for the regimes the
    // auto dispatcher selects.
    let cmin = cost.iter().copied().fold(f64::INFINITY, f64::min);
    let mut kernel: Vec<f64> = cost.iter().map(|c| (-(c - cmin) / reg).exp()).collect();

    let mut u = vec![1.0; n];
    let mut v = vec![1.0; m];
    let mut iterations = 0;
    let mut converged = false;

    // Scratch vectors for the matrix-vector products.
    let mut kv = vec![0.0; n];
    let mut ktu = vec![0.0; m];

    while iterations < max_iter {
        // v ← b ⁄ Kᵀu, then u ← a ⁄ Kv.
        for j in 0..m {
            ktu[j] = 0.0;
        }
        for i in 0..n {
            let ui = u[i];
            let row = &kernel[i * m..(i + 1) * m];
            for (j, kij) in row.iter().enumerate() {
                ktu[j] += ui * kij;
            }
        }
        let mut bad = false;
        for j in 0..m {
            if ktu[j] <= 0.0 || !ktu[j].is_finite() {
                bad = true;
                break;
            }
        }
        if bad {
            // Numerical collapse: keep the previous scaling vectors and let
            // the rounding step salvage a feasible plan.
            break;
        }
        for j in 0..m {
            v[j] = b[j] / ktu[j];
        }
        for i in 0..n {
            let row = &kernel[i * m..(i + 1) * m];
            let mut s = 0.0;
            for (j, kij) in row.iter().enumerate() {
                s += kij * v[j];
            }
            kv[i] = s;
        }
        let mut bad = false;
        for i in 0..n {
            if kv[i] <= 0.0 || !kv[i].is_finite() {
                bad = true;
                break;
            }
        }
        if bad {
            break;
        }
        for i in 0..n {
            u[i] = a[i] / kv[i];
        }
        iterations += 1;

        // Check the column-marginal violation every few sweeps: the row
        // marginals are exact right after the u-update, so the columns carry
        // all the residual error.
        if iterations % 10 == 0 || iterations == max_iter {
            let mut err: f64 = 0.0;
            for j in 0..m {
                let mut col = 0.0;
                for i in 0..n {
                    col += u[i] * kernel[i * m + j];
                }
                col *= v[j];
                err = err.max((col - b[j]).abs());
            }
            if err.is_finite() && err <= tol {
                converged = true;
                break;
            }
        }
    }

    // Materialize P = diag(u) K diag(v) in place of the kernel, then round
    // to exact feasibility.
    for i in 0..n {
        let ui = u[i];
        for j in 0..m {
            let p = ui * kernel[i * m + j] * v[j];
            kernel[i * m + j] = if p.is_finite() { p } else { 0.0 };
        }
    }
    round_to_feasible(&mut kernel, a, b);

    let mut total = 0.0;
    for (p, c) in kernel.iter().zip(cost) {
        total += p * c;
    }

    Ok(EntropicOutcome {
        cost: total.max(0.0),
        plan: if want_plan { Some(kernel) } else { None },
        iterations,
        converged,
    })
}

/// Rounds a nonnegative matrix onto the transportation polytope with row
/// sums `a` and column sums `b` (Altschuler–Weed–Rigollet): scale rows down
/// to at most their targets, then columns, then spread the leftover mass as
/// a rank-one outer product of the residuals.
fn round_to_feasible(p: &mut [f64], a: &[f64], b: &[f64]) {
    let n = a.len();
    let m = b.len();

    let mut row_sum = vec![0.0; n];
    for i in 0..n {
        row_sum[i] = p[i * m..(i + 1) * m].iter().sum();
    }
    for i in 0..n {
        let scale = if row_sum[i] > a[i] && row_sum[i] > 0.0 {
            a[i] / row_sum[i]
        } else {
            1.0
        };
        if scale != 1.0 {
            for x in &mut p[i * m..(i + 1) * m] {
                *x *= scale;
            }
        }
    }

    let mut col_sum = vec![0.0; m];
    for i in 0..n {
        for j in 0..m {
            col_sum[j] += p[i * m + j];
        }
    }
    for j in 0..m {
        if col_sum[j] > b[j] && col_sum[j] > 0.0 {
            let scale = b[j] / col_sum[j];
            for i in 0..n {
                p[i * m + j] *= scale;
            }
        }
    }

    // Residual deficits after the down-scaling passes.
    let mut ra = vec![0.0; n];
    for i in 0..n {
        let s: f64 = p[i * m..(i + 1) * m].iter().sum();
        ra[i] = (a[i] - s).max(0.0);
    }
    let mut rb = vec![0.0; m];
    for j in 0..m {
        let mut s = 0.0;
        for i in 0..n {
            s += p[i * m + j];
        }
        rb[j] = (b[j] - s).max(0.0);
    }
    let deficit: f64 = ra.iter().sum();
    if deficit > 0.0 {
        let inv = 1.0 / deficit;
        for i in 0..n {
            if ra[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                p[i * m + j] += ra[i] * rb[j] * inv;
            }
        }
    }
}
