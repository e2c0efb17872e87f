//! Centralized numerical tolerances with their justifications.
//!
//! Every magic epsilon in the crate lives here so that the rationale is
//! auditable in one place. Values are deliberately conservative for f64
//! arithmetic at the problem scales this crate targets (unit-scale costs,
//! at most ~10⁷ atoms end to end).

/// Probability weights must sum to one within this absolute slack.
///
/// Uniform weights 1/n accumulate at most a few ulps of drift when summed
/// (≤ ~n·2⁻⁵³ ≈ 10⁻¹² even at n = 10⁷), so this bound accepts every honestly
/// normalized vector while rejecting off-by-one-atom mistakes outright.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Transport-plan marginals must match the prescribed measures within this
/// absolute slack per coordinate.
///
/// The simplex solver conserves mass up to one rounding per pivot and the
/// entropic path is re-normalized by an exact rounding step, so observed
/// violations sit near 10⁻¹⁵; 10⁻⁹ leaves three orders of safety without
/// masking genuine feasibility bugs.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Relative threshold for admitting an entering arc in the network simplex.
///
/// A reduced cost is considered negative only below `-EPS · scale`, where
/// `scale` is the magnitude of the potentials/cost involved. 10⁻¹⁴ is an
/// order of magnitude above f64 ulp on unit-scale data, preventing endless
/// pivoting on rounding noise while keeping the optimality gap far below
/// every distance tolerance used in tests (10⁻⁹).
pub const SIMPLEX_ENTERING_EPS: f64 = 1e-14;

/// Iteration cap for bisection root solves. 200 halvings shrink any initial
/// bracket below f64 resolution; the loop also exits early on exact zeros.
pub const BISECTION_MAX_ITER: usize = 200;

/// Absolute floor used when comparing a computed boundary integer (e.g. a
/// minimum sample size) against its real-valued closed form: values within
/// this *relative* slack of an integer are treated as attaining it exactly,
/// compensating for `powf`'s final-ulp error (512^(1/3) style hazards).
pub const BOUNDARY_REL_TOL: f64 = 1e-12;
