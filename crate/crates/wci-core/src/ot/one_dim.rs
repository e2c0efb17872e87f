//! Closed-form transport costs on the line.
//!
//! For one-dimensional marginals the optimal coupling is monotone, so the
//! cost reduces to pairing sorted samples (uniform equal-count case) or to
//! integrating the quantile-function gap (general weighted case).

/// Transport cost between two uniform equal-count samples on the line:
/// `(1/k) Σ |x_(i) − y_(i)|^p` over jointly sorted values.
///
/// Caller guarantees equal nonzero lengths.
pub(crate) fn sorted_uniform_cost(xs: &[f64], ys: &[f64], p: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let k = a.len() as f64;
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs().powf(p))
        .sum::<f64>()
        / k
}

/// General 1-D transport cost between weighted atom lists via the coupling of
/// quantile functions. Also returns the induced plan in original indices.
///
/// Caller guarantees both weight vectors are normalized; atoms with zero
/// weight are skipped.
pub(crate) fn quantile_cost(
    a_pts: &[f64],
    a_w: &[f64],
    b_pts: &[f64],
    b_w: &[f64],
    p: f64,
) -> (f64, Vec<(u32, u32, f64)>) {
    let mut ia: Vec<usize> = (0..a_pts.len()).collect();
    let mut ib: Vec<usize> = (0..b_pts.len()).collect();
    ia.sort_by(|&i, &j| a_pts[i].total_cmp(&a_pts[j]));
    ib.sort_by(|&i, &j| b_pts[i].total_cmp(&b_pts[j]));

    let mut cost = 0.0;
    let mut plan = Vec::new();
    let (mut ka, mut kb) = (0usize, 0usize);
    let mut ra = 0.0; // unassigned mass at current a-atom
    let mut rb = 0.0;
    while ka < ia.len() || kb < ib.len() {
        while ra <= 0.0 && ka < ia.len() {
            ra = a_w[ia[ka]];
            if ra <= 0.0 {
                ka += 1;
            }
        }
        while rb <= 0.0 && kb < ib.len() {
            rb = b_w[ib[kb]];
            if rb <= 0.0 {
                kb += 1;
            }
        }
        if ra <= 0.0 || rb <= 0.0 {
            break; // one side exhausted (possible only via rounding slack)
        }
        let m = ra.min(rb);
        let (i, j) = (ia[ka], ib[kb]);
        cost += m * (a_pts[i] - b_pts[j]).abs().powf(p);
        plan.push((i as u32, j as u32, m));
        ra -= m;
        rb -= m;
        if ra <= 0.0 {
            ka += 1;
        }
        if rb <= 0.0 {
            kb += 1;
        }
    }
    (cost, plan)
}
