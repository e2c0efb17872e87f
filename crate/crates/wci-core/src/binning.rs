//! Partitioning the conditioning space into cells of controlled diameter.
//!
//! Cells are axis-aligned cubes: deterministic addressing, exact diameter
//! control (`edge·√d ≤` the requested diameter), and an exact partition via
//! a half-open boundary convention with a closed top cell per axis. The
//! bounding box comes from the data itself, optionally expanded by a
//! padding margin for prior knowledge about the support.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Dataset, Matrix};
use crate::tols::BOUNDARY_REL_TOL;

/// Smoothness constants of the conditional laws: `l_xy` for the joint pair,
/// `l_x` / `l_y` for the marginals. All nonnegative; at least one must be
/// positive for a finite cell-diameter requirement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LipschitzConstants {
    pub l_x: f64,
    pub l_y: f64,
    pub l_xy: f64,
}

impl LipschitzConstants {
    pub fn new(l_x: f64, l_y: f64, l_xy: f64) -> Result<Self> {
        for (name, v) in [("l_x", l_x), ("l_y", l_y), ("l_xy", l_xy)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a nonnegative finite number, got {v}"
                )));
            }
        }
        Ok(LipschitzConstants { l_x, l_y, l_xy })
    }

    /// The effective constant `max{l_xy, (2^{p−1}(l_x^p + l_y^p))^{1/p}}`
    /// driving both the diameter requirement and the bin-count estimate.
    pub fn combined(&self, p: f64) -> f64 {
        let marginal =
            (2f64.powf(p - 1.0) * (self.l_x.powf(p) + self.l_y.powf(p))).powf(1.0 / p);
        self.l_xy.max(marginal)
    }
}

/// Largest admissible cell diameter for threshold `eps`:
/// `eps / (4·max{l_xy, (2^{p−1}(l_x^p+l_y^p))^{1/p}})`.
pub fn required_diameter(eps: f64, p: f64, l: &LipschitzConstants) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    let denom = l.combined(p);
    if denom <= 0.0 {
        return Err(Error::UnboundedDiameter);
    }
    Ok(eps / (4.0 * denom))
}

/// A grid of axis-aligned cubic cells over a bounding box. Cells are
/// addressed by a linear index in row-major order over the per-axis cell
/// counts (last axis fastest).
#[derive(Debug, Clone, Serialize)]
pub struct BinGrid {
    pub d_z: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub edge: f64,
    pub counts_per_axis: Vec<usize>,
    /// The diameter bound the grid was built for (`edge·√d_z ≤ diameter`).
    pub diameter: f64,
}

impl BinGrid {
    /// Total number of cells (product of the per-axis counts).
    pub fn total_cells(&self) -> usize {
        self.counts_per_axis.iter().product()
    }

    /// Exact diameter of every cell: `edge·√d_z`.
    pub fn cell_diameter(&self) -> f64 {
        self.edge * (self.d_z as f64).sqrt()
    }

    /// Multi-index of a linear cell id.
    pub fn multi_index(&self, mut cell: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d_z];
        for axis in (0..self.d_z).rev() {
            let c = self.counts_per_axis[axis];
            idx[axis] = cell % c;
            cell /= c;
        }
        idx
    }

    /// Geometric center of a cell (independent of which samples landed in
    /// it).
    pub fn centroid(&self, cell: usize) -> Vec<f64> {
        self.multi_index(cell)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.lower[axis] + (i as f64 + 0.5) * self.edge)
            .collect()
    }

    /// Linear cell id of a point, or `None` when it lies outside the
    /// bounding box (beyond a relative tolerance absorbing float noise at
    /// the faces).
    pub fn cell_of(&self, z: &[f64]) -> Option<usize> {
        if z.len() != self.d_z {
            return None;
        }
        let tol = self.edge * 1e-9;
        let mut linear = 0usize;
        for axis in 0..self.d_z {
            let lo = self.lower[axis];
            let hi = self.upper[axis];
            let v = z[axis];
            if v < lo - tol || v > hi + tol {
                return None;
            }
            let c = self.counts_per_axis[axis];
            // Half-open cells [a, a+edge); the top cell is closed so the
            // box upper face still belongs to the partition.
            let raw = ((v - lo) / self.edge).floor();
            let idx = if raw < 0.0 {
                0
            } else {
                (raw as usize).min(c - 1)
            };
            linear = linear * c + idx;
        }
        Some(linear)
    }
}

/// Builds the cubic grid over the bounding box of `z_samples` expanded by
/// `padding`, with `edge = diameter/√d_z` so every cell has diameter at
/// most `diameter`. Axes with zero extent collapse to a single cell.
pub fn build_grid(z_samples: &Matrix, diameter: f64, padding: f64) -> Result<BinGrid> {
    if z_samples.rows() == 0 {
        return Err(Error::EmptySample);
    }
    if !(diameter > 0.0) || !diameter.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "diameter must be > 0, got {diameter}"
        )));
    }
    if !(padding >= 0.0) || !padding.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "padding must be ≥ 0, got {padding}"
        )));
    }
    let d_z = z_samples.cols();
    let edge = diameter / (d_z as f64).sqrt();
    let mut lower = vec![f64::INFINITY; d_z];
    let mut upper = vec![f64::NEG_INFINITY; d_z];
    for i in 0..z_samples.rows() {
        for (axis, &v) in z_samples.row(i).iter().enumerate() {
            lower[axis] = lower[axis].min(v);
            upper[axis] = upper[axis].max(v);
        }
    }
    let mut counts = vec![1usize; d_z];
    let mut total: usize = 1;
    for axis in 0..d_z {
        lower[axis] -= padding;
        upper[axis] += padding;
        let side = upper[axis] - lower[axis];
        if side > 0.0 {
            // Shave a relative epsilon before the ceiling so exact ratios
            // (e.g. side 1.0 over edge 0.5) do not round up through float
            // noise in the division.
            let ratio = side / edge;
            counts[axis] = ((ratio * (1.0 - BOUNDARY_REL_TOL)).ceil() as usize).max(1);
        }
        total = total.checked_mul(counts[axis]).ok_or_else(|| {
            Error::InvalidParameter(
                "grid cell count overflows; increase the diameter or reduce padding".into(),
            )
        })?;
        if total > 1 << 40 {
            return Err(Error::InvalidParameter(format!(
                "grid would have more than 2^40 cells ({total} so far); \
                 increase the diameter or reduce padding"
            )));
        }
    }
    Ok(BinGrid {
        d_z,
        lower,
        upper,
        edge,
        counts_per_axis: counts,
        diameter,
    })
}

/// Assigns every dataset row to its cell. Returns populated cells only,
/// keyed by linear cell id in ascending order.
pub fn assign(data: &Dataset, grid: &BinGrid) -> Result<BTreeMap<usize, Vec<usize>>> {
    if data.d_z() != grid.d_z {
        return Err(Error::DimensionMismatch {
            expected: grid.d_z,
            found: data.d_z(),
            context: "conditioning-variable dimension".into(),
        });
    }
    let mut bins: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut outside = Vec::new();
    for i in 0..data.n() {
        match grid.cell_of(data.z_row(i)) {
            Some(cell) => bins.entry(cell).or_default().push(i),
            None => outside.push(i),
        }
    }
    if !outside.is_empty() {
        return Err(Error::RowsOutsideGrid { rows: outside });
    }
    Ok(bins)
}

/// Planning estimate (not a guarantee) of how many cells a support of
/// diameter `diam_support` needs at threshold `eps`:
/// `(8·diam_support·combined·√d_z/eps)^{d_z}`.
pub fn estimate_bin_count(
    diam_support: f64,
    d_z: usize,
    eps: f64,
    p: f64,
    l: &LipschitzConstants,
) -> Result<f64> {
    if !(diam_support > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "support diameter must be > 0, got {diam_support}"
        )));
    }
    if d_z == 0 {
        return Err(Error::InvalidParameter("d_z must be ≥ 1, got 0".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    let combined = l.combined(p);
    if combined <= 0.0 {
        return Err(Error::UnboundedDiameter);
    }
    Ok((8.0 * diam_support * combined * (d_z as f64).sqrt() / eps).powi(d_z as i32))
}
