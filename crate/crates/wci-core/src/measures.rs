//! Discrete probability measures, aligned (x, y, z) datasets, and the
//! seeded three-way split that turns one sample into a joint/product pair
//! for independence testing.
//!
//! The split takes `k = ⌊n/3⌋` rows for the joint block (keeping each row's
//! x and y together) and pairs the x-coordinates of a second block with the
//! y-coordinates of a third, positionally, so the two resulting measures are
//! built from disjoint rows and the product block carries no dependence
//! between x and y. Leftover rows are discarded.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tols::WEIGHT_SUM_TOL;

/// Dense row-major matrix of f64 samples; rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    /// Builds a matrix from row slices, validating rectangular shape and
    /// finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptySample);
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix rows must have at least one column".into(),
            ));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                    context: format!("row {i}"),
                });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "matrix entries must be finite (row {i})"
                    )));
                }
                data.push(v);
            }
        }
        Ok(Self {
            data,
            rows: rows.len(),
            cols,
        })
    }

    /// Builds a matrix from a flat row-major buffer.
    pub fn from_flat(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 {
            return Err(Error::EmptySample);
        }
        if cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
                context: "flat matrix buffer".into(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { data, rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Rows selected by index, in the given order (duplicates allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Matrix> {
        if indices.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::InvalidParameter(format!(
                    "row index {i} out of range (matrix has {} rows)",
                    self.rows
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Matrix::from_flat(data, indices.len(), self.cols)
    }
}

/// A finitely supported probability measure: weighted atoms in R^d.
///
/// Invariants enforced at construction: at least one atom, a consistent
/// dimension ≥ 1, finite nonnegative weights summing to one within
/// [`WEIGHT_SUM_TOL`], and finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Matrix,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// General weighted constructor.
    pub fn new(points: Matrix, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.rows() {
            return Err(Error::DimensionMismatch {
                expected: points.rows(),
                found: weights.len(),
                context: "weights vs atoms".into(),
            });
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(
                    "weights must be finite and nonnegative".into(),
                ));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1 within {WEIGHT_SUM_TOL:e} (got {sum})"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Uniform measure (weight 1/n on each atom).
    pub fn uniform(points: Matrix) -> Result<Self> {
        let n = points.rows();
        let w = 1.0 / n as f64;
        Self::new(points, vec![w; n])
    }

    /// Uniform measure over explicit rows; convenience for tests and small
    /// constructions.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        Self::uniform(Matrix::from_rows(points)?)
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        false // constructors reject empty supports
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    /// True when every weight equals 1/n to within [`WEIGHT_SUM_TOL`].
    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&wi| (wi - w).abs() <= WEIGHT_SUM_TOL)
    }

    /// The measure shifted by `v` (atom-wise translation).
    pub fn translate(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
                context: "translation vector".into(),
            });
        }
        let rows: Vec<Vec<f64>> = (0..self.len())
            .map(|i| {
                self.point(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a + b)
                    .collect::<Vec<f64>>()
            })
            .collect();
        Self::new(Matrix::from_rows(&rows)?, self.weights.clone())
    }
}

/// The empirical measure of a sample: uniform weight 1/n on each observation,
/// input order preserved, duplicate points kept as distinct atoms.
///
/// # Errors
/// "empty sample" for an empty slice; "dimension mismatch" for ragged rows.
pub fn empirical_measure(sample: &[Vec<f64>]) -> Result<DiscreteMeasure> {
    DiscreteMeasure::from_points(sample)
}

/// Aligned observations of (X, Y, Z): three matrices with equal row counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Matrix,
    y: Matrix,
    z: Matrix,
}

impl Dataset {
    pub fn new(x: Matrix, y: Matrix, z: Matrix) -> Result<Self> {
        if y.rows() != x.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                found: y.rows(),
                context: "y rows vs x rows".into(),
            });
        }
        if z.rows() != x.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                found: z.rows(),
                context: "z rows vs x rows".into(),
            });
        }
        Ok(Self { x, y, z })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d_x(&self) -> usize {
        self.x.cols()
    }

    pub fn d_y(&self) -> usize {
        self.y.cols()
    }

    pub fn d_z(&self) -> usize {
        self.z.cols()
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn z(&self) -> &Matrix {
        &self.z
    }

    pub fn x_row(&self, i: usize) -> &[f64] {
        self.x.row(i)
    }

    pub fn y_row(&self, i: usize) -> &[f64] {
        self.y.row(i)
    }

    pub fn z_row(&self, i: usize) -> &[f64] {
        self.z.row(i)
    }

    /// Concatenated (x, y) coordinates of row `i`.
    pub fn joint_row(&self, i: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.d_x() + self.d_y());
        v.extend_from_slice(self.x_row(i));
        v.extend_from_slice(self.y_row(i));
        v
    }

    /// The sub-dataset given by `rows`, in order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        Dataset::new(
            self.x.select(rows)?,
            self.y.select(rows)?,
            self.z.select(rows)?,
        )
    }
}

/// The joint/product pair produced by the three-way split: two uniform
/// measures with `k` atoms each, built from disjoint rows.
#[derive(Debug, Clone)]
pub struct SplitPair {
    joint: DiscreteMeasure,
    product: DiscreteMeasure,
    k: usize,
}

impl SplitPair {
    /// Empirical joint block: atoms (x_i, y_i).
    pub fn joint(&self) -> &DiscreteMeasure {
        &self.joint
    }

    /// Empirical product block: x from one block paired positionally with y
    /// from another.
    pub fn product(&self) -> &DiscreteMeasure {
        &self.product
    }

    /// Atoms per side.
    pub fn k(&self) -> usize {
        self.k
    }
}

/// Splits `data` into the joint/product pair using a seeded uniform shuffle
/// of the row indices. Deterministic: the same (data, seed) always produces
/// bit-identical measures.
///
/// # Errors
/// "insufficient samples to split" when `n < 3`.
pub fn split_for_independence(data: &Dataset, seed: u64) -> Result<SplitPair> {
    let n = data.n();
    if n < 3 {
        return Err(Error::InsufficientSamples { n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    split_with_order(data, &order)
}

/// Split with an explicit row order (must be a permutation of `0..n`); the
/// seeded entry point [`split_for_independence`] delegates here. Useful for
/// reproducing hand-worked examples with the identity order.
pub fn split_with_order(data: &Dataset, order: &[usize]) -> Result<SplitPair> {
    let n = data.n();
    if n < 3 {
        return Err(Error::InsufficientSamples { n });
    }
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: order.len(),
            context: "row order vs dataset".into(),
        });
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::InvalidParameter(
                "row order must be a permutation of 0..n".into(),
            ));
        }
        seen[i] = true;
    }

    let k = n / 3;
    let joint_rows: Vec<Vec<f64>> = order[..k].iter().map(|&i| data.joint_row(i)).collect();
    let product_rows: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let xi = order[k + j];
            let yi = order[2 * k + j];
            let mut v = Vec::with_capacity(data.d_x() + data.d_y());
            v.extend_from_slice(data.x_row(xi));
            v.extend_from_slice(data.y_row(yi));
            v
        })
        .collect();

    Ok(SplitPair {
        joint: empirical_measure(&joint_rows)?,
        product: empirical_measure(&product_rows)?,
        k,
    })
}

/// The q-th moment of a measure: `(Σ w_i ‖x_i‖^q)^{1/q}` with the Euclidean
/// norm.
///
/// # Errors
/// "q must be > 0" (named-constraint parameter error) for nonpositive q.
pub fn qth_moment(measure: &DiscreteMeasure, q: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "q must be > 0 and finite (got {q})"
        )));
    }
    let mut acc = 0.0;
    for i in 0..measure.len() {
        let norm = measure.point(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        acc += measure.weight(i) * norm.powf(q);
    }
    Ok(acc.powf(1.0 / q))
}

// ---------------------------------------------------------------------------
// CSV ingestion and emission
// ---------------------------------------------------------------------------

/// Parses the pinned CSV schema: header `x1..xdX,y1..ydY,z1..zdZ` (three
/// contiguous 1-based runs, all present), then one f64 row per observation.
/// Parsing is locale-independent ('.' decimal separator only); ragged or
/// non-numeric rows are rejected with row/column diagnostics.
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            location: "header".into(),
            message: e.to_string(),
        })?
        .clone();
    let names: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
    let (d_x, d_y, d_z) = parse_header_runs(&names)?;

    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<Vec<f64>> = Vec::new();
    let mut zs: Vec<Vec<f64>> = Vec::new();
    for (ridx, record) in rdr.records().enumerate() {
        let row_no = ridx + 1; // 1-based data row, matching user expectations
        let record = record.map_err(|e| Error::Csv {
            location: format!("row {row_no}"),
            message: e.to_string(),
        })?;
        if record.len() != d_x + d_y + d_z {
            return Err(Error::Csv {
                location: format!("row {row_no}"),
                message: format!(
                    "expected {} fields, found {}",
                    d_x + d_y + d_z,
                    record.len()
                ),
            });
        }
        let mut parsed = Vec::with_capacity(record.len());
        for (cidx, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Csv {
                location: format!("row {row_no}, column {}", names[cidx]),
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Csv {
                    location: format!("row {row_no}, column {}", names[cidx]),
                    message: "non-finite value".into(),
                });
            }
            parsed.push(value);
        }
        xs.push(parsed[..d_x].to_vec());
        ys.push(parsed[d_x..d_x + d_y].to_vec());
        zs.push(parsed[d_x + d_y..].to_vec());
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    Dataset::new(
        Matrix::from_rows(&xs)?,
        Matrix::from_rows(&ys)?,
        Matrix::from_rows(&zs)?,
    )
}

/// Writes the dataset in the same schema accepted by [`read_csv`]. Floats are
/// emitted with Rust's shortest round-trip formatting, so a write/read cycle
/// reproduces the data bit-exactly.
pub fn write_csv<W: std::io::Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = Vec::new();
    for i in 1..=data.d_x() {
        header.push(format!("x{i}"));
    }
    for i in 1..=data.d_y() {
        header.push(format!("y{i}"));
    }
    for i in 1..=data.d_z() {
        header.push(format!("z{i}"));
    }
    wtr.write_record(&header).map_err(csv_io_error)?;
    for r in 0..data.n() {
        let mut rec: Vec<String> = Vec::with_capacity(header.len());
        rec.extend(data.x_row(r).iter().map(|v| format!("{v}")));
        rec.extend(data.y_row(r).iter().map(|v| format!("{v}")));
        rec.extend(data.z_row(r).iter().map(|v| format!("{v}")));
        wtr.write_record(&rec).map_err(csv_io_error)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_io_error(e: csv::Error) -> Error {
    Error::Csv {
        location: "output".into(),
        message: e.to_string(),
    }
}

/// Validates the `x1..xdX, y1..ydY, z1..zdZ` header layout and returns the
/// three dimensions.
fn parse_header_runs(names: &[String]) -> Result<(usize, usize, usize)> {
    let mut idx = 0;
    let mut dims = [0usize; 3];
    for (slot, prefix) in ["x", "y", "z"].iter().enumerate() {
        let mut count = 0;
        while idx < names.len() && names[idx] == format!("{prefix}{}", count + 1) {
            count += 1;
            idx += 1;
        }
        if count == 0 {
            return Err(Error::Csv {
                location: "header".into(),
                message: format!(
                    "expected column {prefix}1 at position {}, found {:?}; header must be x1..xdX,y1..ydY,z1..zdZ",
                    idx + 1,
                    names.get(idx)
                ),
            });
        }
        dims[slot] = count;
    }
    if idx != names.len() {
        return Err(Error::Csv {
            location: "header".into(),
            message: format!(
                "unexpected trailing column {:?}; header must be x1..xdX,y1..ydY,z1..zdZ",
                names[idx]
            ),
        });
    }
    Ok((dims[0], dims[1], dims[2]))
}
