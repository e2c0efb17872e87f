//! Error type shared by every module in the crate.
//!
//! Variants carry enough structure for callers (notably the CLI) to map
//! failures onto stable exit codes: configuration/input problems versus
//! infeasible-but-well-formed requests.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A measure or dataset constructor received zero points.
    #[error("empty sample")]
    EmptySample,

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    /// Fewer than three rows: the three-way split is undefined.
    #[error("insufficient samples to split: need at least 3 rows, got {n}")]
    InsufficientSamples { n: usize },

    /// The strict 1-D routine was invoked outside its narrow contract.
    #[error("unsupported in 1-D fast path: {reason}")]
    OneDimFastPath { reason: String },

    /// Moment order must strictly exceed the transport order.
    #[error("requires q > p (got p = {p}, q = {q})")]
    QNotAboveP { p: f64, q: f64 },

    /// A parameter violated its documented range; the message names the
    /// constraint (e.g. "p must be ≥ 1").
    #[error("{0}")]
    InvalidParameter(String),

    /// Every Lipschitz constant is zero, so no finite cell diameter is
    /// required and binning serves no purpose.
    #[error("unbounded diameter; binning unnecessary")]
    UnboundedDiameter,

    /// Rows fell outside the bounding box of a foreign grid.
    #[error("rows outside the grid bounding box: {rows:?}")]
    RowsOutsideGrid { rows: Vec<usize> },

    /// No cell holds enough rows to run a single per-bin test.
    #[error("no bin meets min_bin_samples ({min_bin_samples}); largest bin has {largest} rows")]
    NoTestableBins {
        min_bin_samples: usize,
        largest: usize,
    },

    /// The pairwise Lipschitz estimator needs at least two populated bins.
    #[error("insufficient populated bins: need ≥ 2 bins with ≥ {min_bin_samples} rows, found {found}")]
    InsufficientPopulatedBins {
        min_bin_samples: usize,
        found: usize,
    },

    /// A dependence strength of zero denotes the independent model, which has
    /// its own generator.
    #[error("rho = 0 specifies conditional independence; use gen_additive_null")]
    RhoZero,

    /// CSV input violated the pinned schema; the message carries row/column
    /// diagnostics.
    #[error("csv error at {location}: {message}")]
    Csv { location: String, message: String },

    /// An iterative numerical routine failed to make progress.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that describe an infeasible (but syntactically valid)
    /// configuration, as opposed to malformed input. The CLI maps these to a
    /// distinct exit code.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::NoTestableBins { .. })
    }
}
