//! Plug-in estimation of the Wasserstein-Lipschitz smoothness constants
//! that calibrate the cell size of the conditional-independence test.
//!
//! The conditional law of the target coordinates, viewed as a map from the
//! conditioning variable into Wasserstein space, is assumed Lipschitz. The
//! plug-in estimate replaces the population conditionals by bin-restricted
//! empirical measures and the conditioning points by the geometric centers
//! of the cells, then takes the worst ratio
//! `W_p(empirical_j, empirical_j') / ‖center_j − center_j'‖` over all
//! unordered pairs of sufficiently populated cells.
//!
//! The geometric cell center is used rather than the within-cell sample
//! mean: the cells are treated as fixed points of a discrete metric space,
//! so the denominator is data-independent. All pairs are evaluated (the
//! pair count is quadratic in the number of retained cells, fine at the
//! intended scale); pairs involving an under-populated cell are dropped
//! from the maximum rather than polluting it with noisy ratios.
//!
//! The estimate is not monotone under grid refinement; consistency holds
//! only jointly in sample size and cell diameter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::binning::{assign, BinGrid};
use crate::error::{Error, Result};
use crate::measures::{Dataset, DiscreteMeasure};
use crate::ot::{distance_auto, SolverSettings};
use crate::parallel::ordered_parallel_map;

/// Which coordinates the estimated constant governs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    X,
    Y,
    /// The joint (x, y) coordinates.
    XY,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::X => write!(f, "x"),
            Target::Y => write!(f, "y"),
            Target::XY => write!(f, "xy"),
        }
    }
}

/// One evaluated pair of retained cells.
#[derive(Debug, Clone, Serialize)]
pub struct PairRatio {
    pub cell_a: usize,
    pub cell_b: usize,
    /// W_p between the bin-restricted empirical target measures.
    pub distance: f64,
    /// Euclidean distance between the geometric cell centers.
    pub center_distance: f64,
    pub ratio: f64,
}

/// The plug-in estimate: the worst pairwise ratio and where it occurred.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEstimate {
    pub value: f64,
    /// Cell ids of the pair attaining the maximum.
    pub argmax: (usize, usize),
    /// Full diagnostic table; drop it with [`without_table`] for compact
    /// reports.
    ///
    /// [`without_table`]: LipschitzEstimate::without_table
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PairRatio>>,
    pub target: Target,
    pub p: f64,
}

impl LipschitzEstimate {
    pub fn without_table(mut self) -> Self {
        self.pairs = None;
        self
    }
}

fn target_measure(data: &Dataset, rows: &[usize], target: Target) -> Result<DiscreteMeasure> {
    let points: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| match target {
            Target::X => data.x_row(i).to_vec(),
            Target::Y => data.y_row(i).to_vec(),
            Target::XY => data.joint_row(i),
        })
        .collect();
    DiscreteMeasure::from_points(&points)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// Estimates the Lipschitz constant of the chosen target from binned data.
///
/// Cells with fewer than `min_bin_samples` rows are excluded; at least two
/// cells must survive.
pub fn plugin_lipschitz(
    data: &Dataset,
    grid: &BinGrid,
    target: Target,
    p: f64,
    min_bin_samples: usize,
    solver: &SolverSettings,
) -> Result<LipschitzEstimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
    }
    if min_bin_samples == 0 {
        return Err(Error::InvalidParameter(
            "min_bin_samples must be ≥ 1".to_string(),
        ));
    }
    let bins = assign(data, grid)?;
    let mut retained: Vec<(usize, DiscreteMeasure, Vec<f64>)> = Vec::new();
    for (cell, rows) in &bins {
        if rows.len() >= min_bin_samples {
            retained.push((
                *cell,
                target_measure(data, rows, target)?,
                grid.centroid(*cell),
            ));
        }
    }
    if retained.len() < 2 {
        return Err(Error::InsufficientPopulatedBins {
            min_bin_samples,
            found: retained.len(),
        });
    }

    let mut index_pairs = Vec::new();
    for i in 0..retained.len() {
        for j in (i + 1)..retained.len() {
            index_pairs.push((i, j));
        }
    }
    let retained_ref = &retained;
    let outcomes: Vec<Result<PairRatio>> = ordered_parallel_map(index_pairs, move |(i, j)| {
        let (cell_a, mu, ca) = &retained_ref[i];
        let (cell_b, nu, cb) = &retained_ref[j];
        let (distance, _, _) = distance_auto(mu, nu, p, solver)?;
        let center_distance = euclidean(ca, cb);
        Ok(PairRatio {
            cell_a: *cell_a,
            cell_b: *cell_b,
            distance,
            center_distance,
            ratio: distance / center_distance,
        })
    });

    let mut pairs = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        pairs.push(outcome?);
    }
    // Strict > keeps the first (lowest cell-ordered) pair on ties, so the
    // argmax is deterministic.
    let mut best = 0usize;
    for (idx, pair) in pairs.iter().enumerate() {
        if pair.ratio > pairs[best].ratio {
            best = idx;
        }
    }
    Ok(LipschitzEstimate {
        value: pairs[best].ratio,
        argmax: (pairs[best].cell_a, pairs[best].cell_b),
        pairs: Some(pairs),
        target,
        p,
    })
}
