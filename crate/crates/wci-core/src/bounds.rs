//! Finite-sample probability bounds and sample-size calculators.
//!
//! Everything here is a pure closed-form evaluation or a deterministic
//! one-dimensional root solve. The probability-valued operations clamp to
//! [0,1]: the underlying expressions can exceed 1 in weak-parameter regimes
//! and a probability-typed return must stay valid.
//!
//! The constant `kappa` scales the mean-convergence rate in dimension ≥ 3.
//! The literature guarantees its existence as a function of `(p, q, d)`
//! without giving a usable numeric value, so it is a configuration field
//! with default 1.0 — absolute Type I/II guarantees are conditional on the
//! supplied value, and the higher layers attach a warning whenever the
//! default is used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tols::{BISECTION_MAX_ITER, BOUNDARY_REL_TOL};

fn default_kappa() -> f64 {
    1.0
}

/// Parameter bundle for the tail bounds: moment order `q > p`, ambient
/// dimension `d`, support diameter, q-th root-moment bound, truncation
/// level `eta`, and the rate constant `kappa`.
///
/// Individual operations require different subsets; missing required fields
/// produce descriptive errors rather than guesses.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundParams {
    /// Transport order; every bound in this module assumes `p ≥ 1`.
    pub p: f64,
    /// Higher moment order, `q > p` where used.
    #[serde(default)]
    pub q: Option<f64>,
    /// Ambient dimension of the sampled space.
    #[serde(default)]
    pub d: Option<usize>,
    /// Support diameter for the bounded-case bounds.
    #[serde(default)]
    pub diameter: Option<f64>,
    /// Bound on the q-th root-moment `E[‖X‖^q]^{1/q}`.
    #[serde(default)]
    pub moment: Option<f64>,
    /// Truncation level in (0,1) for the unbounded-case bound.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Rate constant for the dimension-≥ 3 expectation bound; defaults to 1.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl BoundParams {
    /// Minimal bundle: order `p`, everything else unset, `kappa = 1`.
    pub fn new(p: f64) -> Self {
        BoundParams {
            p,
            q: None,
            d: None,
            diameter: None,
            moment: None,
            eta: None,
            kappa: 1.0,
        }
    }

    /// Range-checks every field that is present.
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p must be ≥ 1, got {}",
                self.p
            )));
        }
        if let Some(q) = self.q {
            if !(q > self.p) {
                return Err(Error::QNotAboveP { p: self.p, q });
            }
        }
        if let Some(dd) = self.diameter {
            if !(dd > 0.0) || !dd.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "diameter must be > 0, got {dd}"
                )));
            }
        }
        if let Some(m) = self.moment {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "moment must be > 0, got {m}"
                )));
            }
        }
        if let Some(e) = self.eta {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "eta must lie in (0, 1), got {e}"
                )));
            }
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    fn require_q(&self) -> Result<f64> {
        self.q
            .ok_or_else(|| Error::InvalidParameter("missing parameter: q (moment order)".into()))
    }

    fn require_moment(&self) -> Result<f64> {
        self.moment.ok_or_else(|| {
            Error::InvalidParameter("missing parameter: moment (q-th root-moment bound)".into())
        })
    }

    fn require_eta(&self) -> Result<f64> {
        self.eta.ok_or_else(|| {
            Error::InvalidParameter("missing parameter: eta (truncation level)".into())
        })
    }

    fn require_d(&self) -> Result<usize> {
        self.d
            .ok_or_else(|| Error::InvalidParameter("missing parameter: d (ambient dimension)".into()))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be ≥ 1, got 0".into()));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be ≥ 0, got {t}")));
    }
    Ok(())
}

/// Deviation bound for the empirical transport cost of a measure supported
/// on a set of diameter `diameter`: `min(1, exp(−2nt²/diameter^{2p}))`.
pub fn concentration_bounded(n: u64, t: f64, diameter: f64, p: f64) -> Result<f64> {
    check_n(n)?;
    check_t(t)?;
    if !(diameter > 0.0) || !diameter.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "diameter must be > 0, got {diameter}"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    let d2p = diameter.powf(2.0 * p);
    Ok((-2.0 * n as f64 * t * t / d2p).exp().min(1.0))
}

/// The constant `c_{p,q} = 2^{1/q}·A/(A−1) + B/(B−1)` with
/// `A = 2^{1/p−1/q}` and `B = 2^{1/p}`; finite exactly when `q > p`.
pub fn c_pq(p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    if !(q > p) {
        return Err(Error::QNotAboveP { p, q });
    }
    let a = 2f64.powf(1.0 / p - 1.0 / q);
    let b = 2f64.powf(1.0 / p);
    Ok(2f64.powf(1.0 / q) * a / (a - 1.0) + b / (b - 1.0))
}

/// Deviation bound without a bounded support, driven by a q-th moment bound
/// and a truncation level `eta`: with radius `R = moment·eta^{−1/q}` and
/// retention probability `1 − (1−eta)^n`,
/// `min(1, (1−(1−eta)^n) + exp(−2n·((t − (1−(1−eta)^n)·R^p)₊)²/R^{2p}))`.
///
/// This bounds the deviation term only; the mean term it deviates around
/// must be controlled separately (see [`expectation_bound_d3`]).
pub fn concentration_unbounded(n: u64, t: f64, params: &BoundParams) -> Result<f64> {
    check_n(n)?;
    check_t(t)?;
    params.validate()?;
    let q = params.require_q()?;
    let moment = params.require_moment()?;
    let eta = params.require_eta()?;

    let keep = 1.0 - (1.0 - eta).powi(n.min(i32::MAX as u64) as i32);
    let radius = moment * eta.powf(-1.0 / q);
    let rp = radius.powf(params.p);
    let deductible = keep * rp;
    let excess = (t - deductible).max(0.0);
    let bound = keep + (-2.0 * n as f64 * excess * excess / (rp * rp)).exp();
    Ok(bound.clamp(0.0, 1.0))
}

fn check_d3_ranges(p: f64, q: f64, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!(
            "requires d ≥ 3, got d = {d}"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    if !(p < d as f64 / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "requires p < d/2 (got p = {p}, d = {d})"
        )));
    }
    let q_min = d as f64 * p / (d as f64 - p);
    if !(q > q_min) {
        return Err(Error::InvalidParameter(format!(
            "requires q > d·p/(d−p) = {q_min} (got q = {q})"
        )));
    }
    Ok(())
}

/// Mean-convergence bound in dimension `d ≥ 3`:
/// `E[W_p(μ, μ̂_n)] ≤ kappa·moment·n^{−1/d}`, valid for `p < d/2` and
/// `q > d·p/(d−p)`.
pub fn expectation_bound_d3(n: u64, params: &BoundParams, moment: f64) -> Result<f64> {
    check_n(n)?;
    params.validate()?;
    let q = params.require_q()?;
    let d = params.require_d()?;
    check_d3_ranges(params.p, q, d)?;
    if !(moment > 0.0) || !moment.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "moment must be > 0, got {moment}"
        )));
    }
    Ok(params.kappa * moment * (n as f64).powf(-1.0 / d as f64))
}

/// Upper bound on the ε-covering number of the unit square:
/// `2√3/(9ε²) + 8/(πε) + 16`.
pub fn covering_number_unit_square(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    Ok(2.0 * 3f64.sqrt() / (9.0 * eps * eps) + 8.0 / (std::f64::consts::PI * eps) + 16.0)
}

/// The positive root `ε̄_n` of `ε^{2p+2} − (2√3/9 + 8ε/π + 16ε²)/n = 0`
/// together with the residual of the final iterate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsBarSolve {
    pub n: u64,
    pub p: f64,
    pub eps_bar: f64,
    pub residual: f64,
}

fn eps_bar_poly(eps: f64, n: f64, p: f64) -> f64 {
    eps.powf(2.0 * p + 2.0)
        - (2.0 * 3f64.sqrt() / 9.0 + 8.0 * eps / std::f64::consts::PI + 16.0 * eps * eps) / n
}

/// Solves for `ε̄_n` by bisection. The polynomial has exactly one positive
/// root (dividing by `ε^{2p+2}` gives a strictly decreasing function of ε),
/// so a sign-change bracket plus bisection is robust and deterministic. The
/// initial bracket is (0, 1]; for very small `n` the root exceeds 1 and the
/// upper end widens geometrically first.
pub fn solve_eps_bar(n: u64, p: f64) -> Result<EpsBarSolve> {
    check_n(n)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    let nf = n as f64;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while eps_bar_poly(hi, nf, p) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical(
                "eps-bar bracket widening failed to find a sign change".into(),
            ));
        }
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if eps_bar_poly(mid, nf, p) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps_bar = 0.5 * (lo + hi);
    Ok(EpsBarSolve {
        n,
        p,
        eps_bar,
        residual: eps_bar_poly(eps_bar, nf, p),
    })
}

/// Mean-convergence bound on the unit square: `(9^p + 3)·ε̄_n^p` with `ε̄_n`
/// from [`solve_eps_bar`]. The measure is assumed supported in the unit
/// square; that is the caller's responsibility.
pub fn expectation_bound_2d(n: u64, p: f64) -> Result<f64> {
    let solve = solve_eps_bar(n, p)?;
    Ok((9f64.powf(p) + 3.0) * solve.eps_bar.powf(p))
}

/// Two-sample false-rejection bound under equality of laws on a support of
/// diameter `diameter`: `min(1, 2·exp(−2nε^{2p}/(4^{p+1}·diameter^{2p})))`.
///
/// Valid once the mean term is dominated, i.e. the caller has checked that
/// the expectation bound at `n` is ≤ ½·(ε/2)^p (see the min-sample
/// calculators).
pub fn two_sample_null_bound(n: u64, eps: f64, diameter: f64, p: f64) -> Result<f64> {
    check_n(n)?;
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be ≥ 0, got {eps}"
        )));
    }
    if !(diameter > 0.0) || !diameter.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "diameter must be > 0, got {diameter}"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    let num = 2.0 * n as f64 * eps.powf(2.0 * p);
    let den = 4f64.powf(p + 1.0) * diameter.powf(2.0 * p);
    Ok((2.0 * (-num / den).exp()).min(1.0))
}

fn d3_threshold(eps: f64, params: &BoundParams, moment: f64) -> Result<f64> {
    params.validate()?;
    let q = params.require_q()?;
    let d = params.require_d()?;
    check_d3_ranges(params.p, q, d)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    if !(moment > 0.0) || !moment.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "moment must be > 0, got {moment}"
        )));
    }
    // (κ·moment·n^{−1/d})^p ≤ ½(ε/4)^p  ⟺  n ≥ (4·κ·moment·2^{1/p}/ε)^d.
    // Working on the n side avoids misclassifying boundary cases through
    // inexact fractional powers (e.g. 512^{−1/3} rounds above 1/8 in f64).
    let base = 4.0 * params.kappa * moment * 2f64.powf(1.0 / params.p) / eps;
    let rhs = base.powi(d as i32);
    if !rhs.is_finite() {
        return Err(Error::InvalidParameter(
            "required sample size overflows the representable range".into(),
        ));
    }
    Ok(rhs)
}

/// Whether `n` samples suffice for the dimension-≥ 3 mean term to fit the
/// half-budget at threshold `eps`: `(kappa·moment·n^{−1/d})^p ≤ ½(eps/4)^p`.
pub fn d3_condition_holds(n: u64, eps: f64, params: &BoundParams, moment: f64) -> Result<bool> {
    check_n(n)?;
    let rhs = d3_threshold(eps, params, moment)?;
    Ok(n as f64 >= rhs * (1.0 - BOUNDARY_REL_TOL))
}

/// Smallest `n` with `(kappa·moment·n^{−1/d})^p ≤ ½(eps/4)^p`.
pub fn min_samples_d3(eps: f64, params: &BoundParams, moment: f64) -> Result<u64> {
    let rhs = d3_threshold(eps, params, moment)?;
    let guarded = rhs * (1.0 - BOUNDARY_REL_TOL);
    if guarded >= (1u64 << 62) as f64 {
        return Err(Error::InvalidParameter(format!(
            "required sample size {guarded:.3e} exceeds the supported range"
        )));
    }
    Ok((guarded.ceil() as u64).max(1))
}

/// Smallest `n` with `(9^p + 3)·ε̄_n^p ≤ ½(eps/4)^p` on the unit square,
/// found by doubling then bisection (the left side strictly decreases in
/// `n`). Callers choose `eps` per context: the Type I threshold, or the
/// Type II margin `δ_j − ε/2`.
pub fn min_samples_2d(eps: f64, p: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    let target = 0.5 * (eps / 4.0).powf(p);
    let fits = |n: u64| -> Result<bool> {
        Ok((9f64.powf(p) + 3.0) * solve_eps_bar(n, p)?.eps_bar.powf(p) <= target)
    };
    if fits(1)? {
        return Ok(1);
    }
    let mut hi = 2u64;
    while !fits(hi)? {
        if hi >= 1 << 52 {
            return Err(Error::InvalidParameter(format!(
                "required sample size exceeds 2^52 at eps = {eps}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn bounded_concentration_examples() {
        assert_eq!(concentration_bounded(5, 0.0, 1.0, 1.0).unwrap(), 1.0);
        let v = concentration_bounded(100, 0.1, 1.0, 1.0).unwrap();
        assert!(close(v, 0.1353352832366127, 1e-15), "{v}");
        // Exponent linear in n: ten times the samples raises the bound to
        // the tenth power.
        let b1 = concentration_bounded(37, 0.2, 1.5, 2.0).unwrap();
        let b10 = concentration_bounded(370, 0.2, 1.5, 2.0).unwrap();
        assert!(close(b10, b1.powi(10), 1e-12), "{b10} vs {}", b1.powi(10));
    }

    #[test]
    fn c_pq_pinned_values_and_blowup() {
        assert!(close(c_pq(1.0, 2.0).unwrap(), 6.82842712474619, 1e-13));
        assert!(close(c_pq(2.0, 4.0).unwrap(), 10.888634185259061, 1e-13));
        let err = c_pq(2.0, 2.0).unwrap_err().to_string();
        assert!(err.contains("requires q > p"), "{err}");
        // Monotone blow-up as q approaches p from above.
        let near = c_pq(1.0, 1.0 + 1e-3).unwrap();
        assert!(near > c_pq(1.0, 1.01).unwrap());
        assert!(near > 100.0, "{near}");
    }

    #[test]
    fn unbounded_concentration_examples() {
        let params = BoundParams {
            q: Some(2.0),
            moment: Some(1.0),
            eta: Some(0.25),
            ..BoundParams::new(1.0)
        };
        // Radius 2, retention 0.25, deductible 0.5:
        // 0.25 + exp(−2·(3−0.5)²/4).
        let v = concentration_unbounded(1, 3.0, &params).unwrap();
        assert!(close(v, 0.29393693362340745, 1e-13), "{v}");
        // Below the deductible the positive part vanishes and the bound
        // clamps at 1.
        assert_eq!(concentration_unbounded(1, 0.4, &params).unwrap(), 1.0);
        // Vanishing eta blows up the radius; the bound degrades toward 1.
        let loose = BoundParams {
            eta: Some(1e-9),
            ..params
        };
        let degraded = concentration_unbounded(10, 3.0, &loose).unwrap();
        assert!(degraded > 0.999_999 && degraded <= 1.0, "{degraded}");
    }

    #[test]
    fn d3_expectation_bound_examples_and_range_errors() {
        let params = BoundParams {
            q: Some(10.0),
            d: Some(3),
            ..BoundParams::new(1.0)
        };
        let v = expectation_bound_d3(1000, &params, 1.0).unwrap();
        assert!((v - 0.1).abs() < 1e-12, "{v}");
        // κ=2, moment=0.5 is the same product as κ=1, moment=1.
        let scaled = BoundParams { kappa: 2.0, ..params };
        let w = expectation_bound_d3(1000, &scaled, 0.5).unwrap();
        assert!((w - v).abs() < 1e-15);

        let low_d = BoundParams { d: Some(2), ..params };
        let err = expectation_bound_d3(10, &low_d, 1.0).unwrap_err().to_string();
        assert!(err.contains("d ≥ 3"), "{err}");

        let big_p = BoundParams { q: Some(10.0), d: Some(3), ..BoundParams::new(2.0) };
        let err = expectation_bound_d3(10, &big_p, 1.0).unwrap_err().to_string();
        assert!(err.contains("p < d/2"), "{err}");

        let small_q = BoundParams { q: Some(1.2), d: Some(3), ..BoundParams::new(1.0) };
        let err = expectation_bound_d3(10, &small_q, 1.0).unwrap_err().to_string();
        assert!(err.contains("q > d·p/(d−p)"), "{err}");
    }

    #[test]
    fn covering_number_examples() {
        let v = covering_number_unit_square(1.0).unwrap();
        assert!(close(v, 18.931379268930076, 1e-14), "{v}");
        let v = covering_number_unit_square(0.5).unwrap();
        assert!(close(v, 22.632558896779653, 1e-14), "{v}");
        let v = covering_number_unit_square(1e9).unwrap();
        assert!((v - 16.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn eps_bar_root_examples() {
        let s = solve_eps_bar(1_000_000, 1.0).unwrap();
        assert!(close(s.eps_bar, 0.026073614683158455, 1e-9), "{}", s.eps_bar);
        assert!((s.eps_bar - 0.026).abs() < 0.001);
        assert!(s.residual.abs() <= 1e-12);

        // n=1: the root exceeds 1 and exercises the bracket widening.
        let wide = solve_eps_bar(1, 1.0).unwrap();
        assert!(close(wide.eps_bar, 4.080103209621903, 1e-9), "{}", wide.eps_bar);
        assert!(wide.residual.abs() <= 1e-12);

        assert!(
            solve_eps_bar(100_000_000, 1.0).unwrap().eps_bar < s.eps_bar,
            "root must decrease in n"
        );
    }

    #[test]
    fn planar_expectation_bound_examples() {
        let v = expectation_bound_2d(1_000_000, 1.0).unwrap();
        assert!(close(v, 0.31288337619790146, 1e-9), "{v}");
        let v2 = expectation_bound_2d(1_000_000, 2.0).unwrap();
        assert!(close(v2, 0.7719245870047249, 1e-9), "{v2}");
        assert!(
            expectation_bound_2d(2_000_000, 1.0).unwrap() < v,
            "bound must decrease in n"
        );
    }

    #[test]
    fn null_bound_examples() {
        assert_eq!(two_sample_null_bound(10, 0.0, 1.0, 1.0).unwrap(), 1.0);
        let v = two_sample_null_bound(1000, 0.5, 1.0, 1.0).unwrap();
        // 2·exp(−2·1000·0.25/16) = 2·exp(−31.25).
        assert!(close(v, 5.362007735563607e-14, 1e-12), "{v}");
        let wide = two_sample_null_bound(1000, 0.5, 2.0, 1.0).unwrap();
        assert!(wide > v, "larger diameter must weaken the bound");
    }

    #[test]
    fn min_samples_d3_exact_boundary() {
        let params = BoundParams {
            q: Some(10.0),
            d: Some(3),
            ..BoundParams::new(1.0)
        };
        let n = min_samples_d3(1.0, &params, 1.0).unwrap();
        assert_eq!(n, 512);
        assert!(d3_condition_holds(512, 1.0, &params, 1.0).unwrap());
        assert!(!d3_condition_holds(511, 1.0, &params, 1.0).unwrap());

        // Doubling eps divides the requirement by 2^d.
        assert_eq!(min_samples_d3(2.0, &params, 1.0).unwrap(), 64);
        // Doubling kappa multiplies it by 2^d.
        let heavy = BoundParams { kappa: 2.0, ..params };
        assert_eq!(min_samples_d3(1.0, &heavy, 1.0).unwrap(), 4096);
    }

    #[test]
    fn min_samples_2d_examples() {
        assert_eq!(min_samples_2d(2.496, 1.0).unwrap(), 1_010_830);
        assert_eq!(min_samples_2d(1e9, 1.0).unwrap(), 1);
        assert!(
            min_samples_2d(1.0, 1.0).unwrap() > min_samples_2d(2.496, 1.0).unwrap(),
            "smaller eps needs more samples"
        );
        let n = min_samples_2d(3.0, 1.0).unwrap();
        let target = 0.5 * (3.0 / 4.0);
        let at = |k: u64| 12.0 * solve_eps_bar(k, 1.0).unwrap().eps_bar;
        assert!(at(n) <= target && at(n - 1) > target);
    }

    #[test]
    fn param_validation_messages() {
        let bad = BoundParams { eta: Some(1.5), ..BoundParams::new(1.0) };
        assert!(bad.validate().unwrap_err().to_string().contains("eta"));
        let bad = BoundParams { q: Some(0.5), ..BoundParams::new(1.0) };
        assert!(bad.validate().unwrap_err().to_string().contains("requires q > p"));
        let bad = BoundParams { kappa: 0.0, ..BoundParams::new(1.0) };
        assert!(bad.validate().unwrap_err().to_string().contains("kappa"));
        assert!(concentration_bounded(0, 0.1, 1.0, 1.0).is_err());
        let missing = concentration_unbounded(5, 0.1, &BoundParams::new(1.0))
            .unwrap_err()
            .to_string();
        assert!(missing.contains("missing parameter"), "{missing}");
    }
}
