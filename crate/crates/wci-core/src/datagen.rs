//! Seeded synthetic generators for validating the test: additive-noise
//! models where conditional independence holds by construction, a
//! shared-noise family where it fails with tunable strength, and a polar
//! construction whose conditional laws are mutually singular yet move
//! continuously in Wasserstein distance.
//!
//! Every generator is a pure function of its scenario description, so a
//! fixture can be regenerated bit-for-bit from `(spec, seed)`. Noise
//! families all have bounded support — the bounded-support probability
//! bounds need a support diameter, and admitting unbounded noise here
//! would only manufacture configuration errors downstream.
//!
//! Truncated Gaussians are realized by rejection (resample until inside
//! the radius), never by clipping: clipping would pile atoms onto the
//! boundary and visibly distort transport distances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Dataset, DiscreteMeasure, Matrix};
use crate::ot::{distance_auto, SolverChoice, SolverSettings};

/// Bounded scalar noise families; vectors draw each coordinate i.i.d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Gaussian with standard deviation `sigma`, resampled until the draw
    /// lies in `[-radius, radius]`.
    TruncatedGaussian { sigma: f64, radius: f64 },
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

impl NoiseSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::TruncatedGaussian { sigma, radius } => {
                if !(sigma >= 0.0) || !sigma.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "noise sigma must be ≥ 0, got {sigma}"
                    )));
                }
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "noise radius must be > 0, got {radius}"
                    )));
                }
            }
            NoiseSpec::Uniform { half_width } => {
                if !(half_width >= 0.0) || !half_width.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "noise half_width must be ≥ 0, got {half_width}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Declared bound on |draw|; the support is `[-r, r]`.
    pub fn support_radius(&self) -> f64 {
        match *self {
            NoiseSpec::TruncatedGaussian { radius, .. } => radius,
            NoiseSpec::Uniform { half_width } => half_width,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            NoiseSpec::TruncatedGaussian { sigma, radius } => loop {
                let draw: f64 = rng.sample(StandardNormal);
                let v = sigma * draw;
                if v.abs() <= radius {
                    return v;
                }
            },
            NoiseSpec::Uniform { half_width } => {
                rng.gen::<f64>() * (2.0 * half_width) - half_width
            }
        }
    }

    fn sample_vec(&self, rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.sample(rng)).collect()
    }
}

/// Declared mean functions: affine maps, or 1-D lookup tables with linear
/// interpolation (clamped outside the table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FnSpec {
    /// `out[i] = intercept[i] + Σ_j slope[i][j]·z[j]`.
    Affine {
        intercept: Vec<f64>,
        slope: Vec<Vec<f64>>,
    },
    /// Requires a scalar conditioning variable; `zs` strictly increasing.
    Tabulated { zs: Vec<f64>, values: Vec<Vec<f64>> },
}

impl FnSpec {
    /// Scalar-to-scalar affine map, the common case in fixtures.
    pub fn affine_1d(intercept: f64, slope: f64) -> Self {
        FnSpec::Affine {
            intercept: vec![intercept],
            slope: vec![vec![slope]],
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            FnSpec::Affine { intercept, .. } => intercept.len(),
            FnSpec::Tabulated { values, .. } => values.first().map_or(0, Vec::len),
        }
    }

    fn validate(&self, d_z: usize) -> Result<()> {
        match self {
            FnSpec::Affine { intercept, slope } => {
                if intercept.is_empty() {
                    return Err(Error::InvalidParameter(
                        "affine function needs at least one output coordinate".to_string(),
                    ));
                }
                if slope.len() != intercept.len() {
                    return Err(Error::InvalidParameter(format!(
                        "affine function has {} intercepts but {} slope rows",
                        intercept.len(),
                        slope.len()
                    )));
                }
                for row in slope {
                    if row.len() != d_z {
                        return Err(Error::InvalidParameter(format!(
                            "affine slope row has {} coefficients but z has {} coordinates",
                            row.len(),
                            d_z
                        )));
                    }
                }
                for v in intercept.iter().chain(slope.iter().flatten()) {
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter(
                            "affine coefficients must be finite".to_string(),
                        ));
                    }
                }
            }
            FnSpec::Tabulated { zs, values } => {
                if d_z != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "tabulated functions require a scalar z, got d_z = {d_z}"
                    )));
                }
                if zs.len() < 2 || zs.len() != values.len() {
                    return Err(Error::InvalidParameter(format!(
                        "tabulated function needs ≥ 2 rows with matching zs/values lengths, \
                         got {} and {}",
                        zs.len(),
                        values.len()
                    )));
                }
                if zs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::InvalidParameter(
                        "tabulated zs must be strictly increasing".to_string(),
                    ));
                }
                let dim = values[0].len();
                if dim == 0 || values.iter().any(|v| v.len() != dim) {
                    return Err(Error::InvalidParameter(
                        "tabulated values must be non-empty and of equal dimension".to_string(),
                    ));
                }
                if zs.iter().chain(values.iter().flatten()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "tabulated entries must be finite".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the function; `z` must match the validated dimension.
    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        match self {
            FnSpec::Affine { intercept, slope } => intercept
                .iter()
                .zip(slope)
                .map(|(&b, row)| b + row.iter().zip(z).map(|(&s, &zj)| s * zj).sum::<f64>())
                .collect(),
            FnSpec::Tabulated { zs, values } => {
                let t = z[0];
                if t <= zs[0] {
                    return values[0].clone();
                }
                if t >= *zs.last().unwrap() {
                    return values.last().unwrap().clone();
                }
                let hi = zs.partition_point(|&v| v < t).max(1);
                let (z0, z1) = (zs[hi - 1], zs[hi]);
                let w = (t - z0) / (z1 - z0);
                values[hi - 1]
                    .iter()
                    .zip(&values[hi])
                    .map(|(&a, &b)| a + w * (b - a))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    AdditiveNull,
    SharedNoiseAlt,
    Polar,
    /// A dataset supplied by the caller; carried in manifests for labeling
    /// but with no generator behind it.
    Custom,
}

/// Full description of a synthetic scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n: usize,
    pub seed: u64,
    pub d_x: usize,
    pub d_y: usize,
    /// Z is uniform on the box `[z_lower, z_upper]`; the length is d_z.
    pub z_lower: Vec<f64>,
    pub z_upper: Vec<f64>,
    pub f: FnSpec,
    pub g: FnSpec,
    pub noise: NoiseSpec,
    /// Dependence strength, alternatives only; ∈ (0, 1].
    #[serde(default)]
    pub rho: Option<f64>,
}

impl ScenarioSpec {
    fn d_z(&self) -> usize {
        self.z_lower.len()
    }

    fn validate_common(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be ≥ 1".to_string()));
        }
        if self.z_lower.is_empty() || self.z_lower.len() != self.z_upper.len() {
            return Err(Error::InvalidParameter(format!(
                "z box needs matching non-empty bounds, got {} lower and {} upper",
                self.z_lower.len(),
                self.z_upper.len()
            )));
        }
        for (l, u) in self.z_lower.iter().zip(&self.z_upper) {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(Error::InvalidParameter(format!(
                    "z box bounds must be finite with lower ≤ upper, got [{l}, {u}]"
                )));
            }
        }
        self.noise.validate()?;
        self.f.validate(self.d_z())?;
        self.g.validate(self.d_z())?;
        Ok(())
    }

    fn require_kind(&self, kind: ScenarioKind, generator: &str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParameter(format!(
                "scenario kind {:?} does not match generator {generator}",
                self.kind
            )));
        }
        Ok(())
    }

    fn require_output_dims(&self) -> Result<()> {
        if self.f.out_dim() != self.d_x {
            return Err(Error::InvalidParameter(format!(
                "f produces {} coordinates but d_x = {}",
                self.f.out_dim(),
                self.d_x
            )));
        }
        if self.g.out_dim() != self.d_y {
            return Err(Error::InvalidParameter(format!(
                "g produces {} coordinates but d_y = {}",
                self.g.out_dim(),
                self.d_y
            )));
        }
        Ok(())
    }
}

fn draw_z(rng: &mut ChaCha8Rng, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    lower
        .iter()
        .zip(upper)
        .map(|(&l, &u)| l + rng.gen::<f64>() * (u - l))
        .collect()
}

fn dataset_from_rows(
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
) -> Result<Dataset> {
    Dataset::new(
        Matrix::from_rows(&x)?,
        Matrix::from_rows(&y)?,
        Matrix::from_rows(&z)?,
    )
}

/// X = f(Z) + E₁, Y = g(Z) + E₂ with E₁ ⊥⊥ E₂: conditional independence
/// holds by construction.
pub fn gen_additive_null(spec: &ScenarioSpec) -> Result<Dataset> {
    spec.require_kind(ScenarioKind::AdditiveNull, "gen_additive_null")?;
    spec.validate_common()?;
    spec.require_output_dims()?;
    if spec.rho.is_some() {
        return Err(Error::InvalidParameter(
            "rho applies only to dependent alternatives".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut xs = Vec::with_capacity(spec.n);
    let mut ys = Vec::with_capacity(spec.n);
    let mut zs = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let z = draw_z(&mut rng, &spec.z_lower, &spec.z_upper);
        let e1 = spec.noise.sample_vec(&mut rng, spec.d_x);
        let e2 = spec.noise.sample_vec(&mut rng, spec.d_y);
        let fx = spec.f.eval(&z);
        let gy = spec.g.eval(&z);
        xs.push(fx.iter().zip(&e1).map(|(a, b)| a + b).collect());
        ys.push(gy.iter().zip(&e2).map(|(a, b)| a + b).collect());
        zs.push(z);
    }
    dataset_from_rows(xs, ys, zs)
}

/// X = f(Z) + E₁, Y = g(Z) + ρ·E₁ + √(1−ρ²)·E₂: the shared noise couples
/// X and Y given Z for every ρ > 0. When d_y < d_x the first d_y
/// coordinates of E₁ are shared.
pub fn gen_shared_noise_alt(spec: &ScenarioSpec) -> Result<Dataset> {
    spec.require_kind(ScenarioKind::SharedNoiseAlt, "gen_shared_noise_alt")?;
    spec.validate_common()?;
    spec.require_output_dims()?;
    let rho = shared_noise_rho(spec)?;
    if spec.d_y > spec.d_x {
        return Err(Error::InvalidParameter(format!(
            "shared-noise coupling needs d_y ≤ d_x, got d_y = {} > d_x = {}",
            spec.d_y, spec.d_x
        )));
    }
    let mix = (1.0 - rho * rho).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut xs = Vec::with_capacity(spec.n);
    let mut ys = Vec::with_capacity(spec.n);
    let mut zs = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let z = draw_z(&mut rng, &spec.z_lower, &spec.z_upper);
        let e1 = spec.noise.sample_vec(&mut rng, spec.d_x);
        let e2 = spec.noise.sample_vec(&mut rng, spec.d_y);
        let fx = spec.f.eval(&z);
        let gy = spec.g.eval(&z);
        xs.push(fx.iter().zip(&e1).map(|(a, b)| a + b).collect());
        ys.push(
            gy.iter()
                .enumerate()
                .map(|(i, a)| a + rho * e1[i] + mix * e2[i])
                .collect(),
        );
        zs.push(z);
    }
    dataset_from_rows(xs, ys, zs)
}

fn shared_noise_rho(spec: &ScenarioSpec) -> Result<f64> {
    let Some(rho) = spec.rho else {
        return Err(Error::InvalidParameter(
            "shared-noise alternative needs rho".to_string(),
        ));
    };
    if rho == 0.0 {
        return Err(Error::RhoZero);
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in (0, 1], got {rho}"
        )));
    }
    Ok(rho)
}

/// Z is a radius, X and Y live on the circle of that radius with noisy
/// angles f(Z) + E and g(Z) + E′ (polar-to-Cartesian embedding). The
/// conditional laws at different radii are mutually singular, yet close in
/// transport distance when the radii are close.
pub fn gen_polar(spec: &ScenarioSpec) -> Result<Dataset> {
    spec.require_kind(ScenarioKind::Polar, "gen_polar")?;
    spec.validate_common()?;
    if spec.d_x != 2 || spec.d_y != 2 || spec.d_z() != 1 {
        return Err(Error::InvalidParameter(format!(
            "polar scenario requires d_x = d_y = 2 and scalar z, got d_x = {}, d_y = {}, \
             d_z = {}",
            spec.d_x,
            spec.d_y,
            spec.d_z()
        )));
    }
    if spec.f.out_dim() != 1 || spec.g.out_dim() != 1 {
        return Err(Error::InvalidParameter(
            "polar angle functions must be scalar-valued".to_string(),
        ));
    }
    let r_min = spec.z_lower[0];
    if !(r_min > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "r_min must be > 0, got {r_min}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut xs = Vec::with_capacity(spec.n);
    let mut ys = Vec::with_capacity(spec.n);
    let mut zs = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let z = draw_z(&mut rng, &spec.z_lower, &spec.z_upper);
        let r = z[0];
        let theta1 = spec.f.eval(&z)[0] + spec.noise.sample(&mut rng);
        let theta2 = spec.g.eval(&z)[0] + spec.noise.sample(&mut rng);
        xs.push(vec![r * theta1.cos(), r * theta1.sin()]);
        ys.push(vec![r * theta2.cos(), r * theta2.sin()]);
        zs.push(z);
    }
    dataset_from_rows(xs, ys, zs)
}

/// Dispatches on the scenario kind.
pub fn generate(spec: &ScenarioSpec) -> Result<Dataset> {
    match spec.kind {
        ScenarioKind::AdditiveNull => gen_additive_null(spec),
        ScenarioKind::SharedNoiseAlt => gen_shared_noise_alt(spec),
        ScenarioKind::Polar => gen_polar(spec),
        ScenarioKind::Custom => Err(Error::InvalidParameter(
            "custom scenarios supply their own dataset; no generator exists".to_string(),
        )),
    }
}

/// Measures the separation the test must detect at a fixed conditioning
/// point: the exact W_p between a fresh m-sample of the conditional joint
/// law and a fresh m-sample of the product of its marginals, both drawn at
/// `z`. The value is an empirical stand-in for the population separation;
/// it is measured, never assumed.
pub fn measure_conditional_separation(
    spec: &ScenarioSpec,
    z: &[f64],
    p: f64,
    m: usize,
    seed: u64,
) -> Result<f64> {
    spec.validate_common()?;
    spec.require_output_dims()?;
    if z.len() != spec.d_z() {
        return Err(Error::InvalidParameter(format!(
            "conditioning point has {} coordinates but the scenario's z has {}",
            z.len(),
            spec.d_z()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter(
            "oracle sample size must be ≥ 1".to_string(),
        ));
    }
    let rho = match spec.kind {
        ScenarioKind::SharedNoiseAlt => shared_noise_rho(spec)?,
        _ => 0.0,
    };
    if rho > 0.0 && spec.d_y > spec.d_x {
        return Err(Error::InvalidParameter(format!(
            "shared-noise coupling needs d_y ≤ d_x, got d_y = {} > d_x = {}",
            spec.d_y, spec.d_x
        )));
    }
    let mix = (1.0 - rho * rho).sqrt();
    let fx = spec.f.eval(z);
    let gy = spec.g.eval(z);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut joint = Vec::with_capacity(m);
    for _ in 0..m {
        let e1 = spec.noise.sample_vec(&mut rng, spec.d_x);
        let e2 = spec.noise.sample_vec(&mut rng, spec.d_y);
        let mut row: Vec<f64> = fx.iter().zip(&e1).map(|(a, b)| a + b).collect();
        row.extend(
            gy.iter()
                .enumerate()
                .map(|(i, a)| a + rho * e1[i] + mix * e2[i]),
        );
        joint.push(row);
    }
    // The product side redraws the x and y noises independently, so the
    // shared component no longer links the two blocks.
    let mut product = Vec::with_capacity(m);
    for _ in 0..m {
        let a = spec.noise.sample_vec(&mut rng, spec.d_x);
        let b = spec.noise.sample_vec(&mut rng, spec.d_y);
        let c = spec.noise.sample_vec(&mut rng, spec.d_y);
        let mut row: Vec<f64> = fx.iter().zip(&a).map(|(u, v)| u + v).collect();
        row.extend(
            gy.iter()
                .enumerate()
                .map(|(i, u)| u + rho * b[i] + mix * c[i]),
        );
        product.push(row);
    }

    let mu = DiscreteMeasure::from_points(&joint)?;
    let nu = DiscreteMeasure::from_points(&product)?;
    let settings = SolverSettings {
        method: SolverChoice::Exact,
        ..SolverSettings::default()
    };
    let (d, _, _) = distance_auto(&mu, &nu, p, &settings)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::build_grid;
    use crate::measures::empirical_measure;

    fn null_spec() -> ScenarioSpec {
        ScenarioSpec {
            kind: ScenarioKind::AdditiveNull,
            n: 200,
            seed: 7,
            d_x: 1,
            d_y: 1,
            z_lower: vec![0.0],
            z_upper: vec![1.0],
            f: FnSpec::affine_1d(0.0, 1.0),
            g: FnSpec::affine_1d(0.0, -1.0),
            noise: NoiseSpec::TruncatedGaussian {
                sigma: 0.1,
                radius: 0.3,
            },
            rho: None,
        }
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let spec = null_spec();
        let a = gen_additive_null(&spec).unwrap();
        let b = gen_additive_null(&spec).unwrap();
        for i in 0..spec.n {
            assert_eq!(a.x_row(i), b.x_row(i));
            assert_eq!(a.y_row(i), b.y_row(i));
            assert_eq!(a.z_row(i), b.z_row(i));
        }
        let mut other = spec.clone();
        other.seed = 8;
        let c = gen_additive_null(&other).unwrap();
        assert!((0..spec.n).any(|i| a.x_row(i) != c.x_row(i)));
    }

    #[test]
    fn zero_model_is_identically_zero() {
        let spec = ScenarioSpec {
            f: FnSpec::affine_1d(0.0, 0.0),
            g: FnSpec::affine_1d(0.0, 0.0),
            noise: NoiseSpec::Uniform { half_width: 0.0 },
            ..null_spec()
        };
        let data = gen_additive_null(&spec).unwrap();
        for i in 0..spec.n {
            assert_eq!(data.x_row(i), &[0.0]);
            assert_eq!(data.y_row(i), &[0.0]);
        }
    }

    #[test]
    fn truncation_respects_the_radius_without_boundary_atoms() {
        let spec = ScenarioSpec {
            n: 2000,
            noise: NoiseSpec::TruncatedGaussian {
                sigma: 0.5,
                radius: 0.3,
            },
            ..null_spec()
        };
        let data = gen_additive_null(&spec).unwrap();
        let mut max_abs: f64 = 0.0;
        for i in 0..spec.n {
            let e = data.x_row(i)[0] - data.z_row(i)[0];
            assert!(e.abs() <= 0.3 + 1e-12, "residual {e} outside the radius");
            // A clipped sampler would leave atoms exactly on the boundary.
            assert!((e.abs() - 0.3).abs() > 1e-9, "boundary atom at {e}");
            max_abs = max_abs.max(e.abs());
        }
        // With sigma well above the radius the support should actually fill.
        assert!(max_abs > 0.15);
    }

    #[test]
    fn additive_conditional_laws_are_translates_across_bins() {
        let spec = ScenarioSpec {
            n: 1000,
            ..null_spec()
        };
        let data = gen_additive_null(&spec).unwrap();
        let grid = build_grid(data.z(), 0.1, 0.0).unwrap();
        let bins = crate::binning::assign(&data, &grid).unwrap();
        let first = *bins.keys().next().unwrap();
        let last = *bins.keys().next_back().unwrap();
        assert!(bins[&first].len() >= 40 && bins[&last].len() >= 40);
        let x_of = |rows: &[usize]| {
            empirical_measure(&rows.iter().map(|&i| data.x_row(i).to_vec()).collect::<Vec<_>>())
                .unwrap()
        };
        let mu = x_of(&bins[&first]);
        let nu = x_of(&bins[&last]);
        let shift = grid.centroid(last)[0] - grid.centroid(first)[0];
        let settings = SolverSettings::default();
        let (raw, _, _) = distance_auto(&mu, &nu, 1.0, &settings).unwrap();
        let (residual, _, _) =
            distance_auto(&mu.translate(&[shift]).unwrap(), &nu, 1.0, &settings).unwrap();
        // f has slope 1, so the model-predicted translate removes nearly
        // all of the distance between the two bins' conditional laws.
        assert!(raw >= 0.8 * shift, "raw {raw} vs shift {shift}");
        assert!(residual <= 0.15, "residual {residual}");
        assert!(residual <= 0.25 * raw);
    }

    #[test]
    fn shared_noise_at_full_strength_copies_x_into_y() {
        let spec = ScenarioSpec {
            kind: ScenarioKind::SharedNoiseAlt,
            f: FnSpec::affine_1d(0.0, 0.0),
            g: FnSpec::affine_1d(0.0, 0.0),
            noise: NoiseSpec::Uniform { half_width: 0.7 },
            rho: Some(1.0),
            ..null_spec()
        };
        let data = gen_shared_noise_alt(&spec).unwrap();
        for i in 0..spec.n {
            assert_eq!(data.x_row(i), data.y_row(i));
        }
    }

    #[test]
    fn rho_validation() {
        let mut spec = ScenarioSpec {
            kind: ScenarioKind::SharedNoiseAlt,
            rho: Some(0.0),
            ..null_spec()
        };
        assert!(gen_shared_noise_alt(&spec)
            .unwrap_err()
            .to_string()
            .contains("use gen_additive_null"));
        spec.rho = Some(1.5);
        assert!(gen_shared_noise_alt(&spec)
            .unwrap_err()
            .to_string()
            .contains("rho must lie in (0, 1]"));
        spec.rho = None;
        assert!(gen_shared_noise_alt(&spec)
            .unwrap_err()
            .to_string()
            .contains("needs rho"));
        // And the null generator refuses a stray rho.
        let null = ScenarioSpec {
            rho: Some(0.5),
            ..null_spec()
        };
        assert!(gen_additive_null(&null).unwrap_err().to_string().contains("alternatives"));
    }

    #[test]
    fn diagonal_versus_product_distance_at_two_atoms() {
        // Conditional laws implied by rho = 1 with two-atom ±a noise: the
        // joint sits on the diagonal corners, the product on all four.
        let a = 0.7;
        let diagonal =
            DiscreteMeasure::from_points(&[vec![a, a], vec![-a, -a]]).unwrap();
        let product = DiscreteMeasure::from_points(&[
            vec![a, a],
            vec![a, -a],
            vec![-a, a],
            vec![-a, -a],
        ])
        .unwrap();
        let settings = SolverSettings {
            method: SolverChoice::Exact,
            ..SolverSettings::default()
        };
        let (d, _, _) = distance_auto(&diagonal, &product, 1.0, &settings).unwrap();
        assert!((d - a).abs() < 1e-12, "got {d}, expected {a}");
    }

    #[test]
    fn oracle_separation_is_positive_and_repeatable() {
        let spec = ScenarioSpec {
            kind: ScenarioKind::SharedNoiseAlt,
            f: FnSpec::affine_1d(0.0, 0.0),
            g: FnSpec::affine_1d(0.0, 0.0),
            noise: NoiseSpec::Uniform { half_width: 1.0 },
            rho: Some(1.0),
            ..null_spec()
        };
        let s1 = measure_conditional_separation(&spec, &[0.5], 1.0, 400, 11).unwrap();
        let s2 = measure_conditional_separation(&spec, &[0.5], 1.0, 400, 11).unwrap();
        assert_eq!(s1, s2);
        // Population W_1 between the diagonal and the product of uniform
        // marginals is ≥ (E|U−U'|)/√2 ≈ 0.47; sampling noise at m = 400
        // stays well clear of 0.3.
        assert!(s1 > 0.3, "separation {s1}");
        let null_sep =
            measure_conditional_separation(&null_spec(), &[0.5], 1.0, 400, 11).unwrap();
        assert!(null_sep < s1 / 3.0, "null {null_sep} vs alt {s1}");
    }

    #[test]
    fn polar_constant_angles_give_atoms_at_chord_distance() {
        let spec = ScenarioSpec {
            kind: ScenarioKind::Polar,
            n: 2,
            d_x: 2,
            d_y: 2,
            z_lower: vec![1.0],
            z_upper: vec![2.0],
            f: FnSpec::affine_1d(0.8, 0.0),
            g: FnSpec::affine_1d(2.1, 0.0),
            noise: NoiseSpec::Uniform { half_width: 0.0 },
            ..null_spec()
        };
        let data = gen_polar(&spec).unwrap();
        for i in 0..2 {
            let r = data.z_row(i)[0];
            let x = data.x_row(i);
            assert!((x[0].hypot(x[1]) - r).abs() < 1e-12);
            assert!((x[1].atan2(x[0]) - 0.8).abs() < 1e-12);
        }
        let mu = DiscreteMeasure::from_points(&[data.x_row(0).to_vec()]).unwrap();
        let nu = DiscreteMeasure::from_points(&[data.x_row(1).to_vec()]).unwrap();
        let settings = SolverSettings::default();
        let (d, _, _) = distance_auto(&mu, &nu, 2.0, &settings).unwrap();
        let chord = (data.z_row(0)[0] - data.z_row(1)[0]).abs();
        assert!((d - chord).abs() < 1e-12, "got {d}, chord {chord}");
    }

    #[test]
    fn polar_validation() {
        let mut spec = ScenarioSpec {
            kind: ScenarioKind::Polar,
            d_x: 2,
            d_y: 2,
            z_lower: vec![0.0],
            z_upper: vec![1.0],
            ..null_spec()
        };
        assert!(gen_polar(&spec).unwrap_err().to_string().contains("r_min"));
        spec.z_lower = vec![1.5];
        spec.z_upper = vec![1.5];
        spec.n = 5;
        let data = gen_polar(&spec).unwrap();
        for i in 0..5 {
            assert_eq!(data.z_row(i)[0], 1.5);
            let x = data.x_row(i);
            assert!((x[0].hypot(x[1]) - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_and_kind_validation() {
        let mut spec = null_spec();
        spec.d_x = 2; // f still produces one coordinate
        assert!(gen_additive_null(&spec)
            .unwrap_err()
            .to_string()
            .contains("d_x"));

        let spec = ScenarioSpec {
            kind: ScenarioKind::SharedNoiseAlt,
            d_x: 1,
            d_y: 2,
            f: FnSpec::affine_1d(0.0, 1.0),
            g: FnSpec::Affine {
                intercept: vec![0.0, 0.0],
                slope: vec![vec![1.0], vec![1.0]],
            },
            rho: Some(0.5),
            ..null_spec()
        };
        assert!(gen_shared_noise_alt(&spec)
            .unwrap_err()
            .to_string()
            .contains("d_y ≤ d_x"));

        assert!(gen_shared_noise_alt(&null_spec())
            .unwrap_err()
            .to_string()
            .contains("does not match generator"));
        let custom = ScenarioSpec {
            kind: ScenarioKind::Custom,
            ..null_spec()
        };
        assert!(generate(&custom).unwrap_err().to_string().contains("custom"));
    }

    #[test]
    fn tabulated_functions_interpolate_and_clamp() {
        let f = FnSpec::Tabulated {
            zs: vec![0.0, 1.0],
            values: vec![vec![0.0], vec![2.0]],
        };
        f.validate(1).unwrap();
        assert_eq!(f.eval(&[0.5]), vec![1.0]);
        assert_eq!(f.eval(&[-1.0]), vec![0.0]);
        assert_eq!(f.eval(&[2.0]), vec![2.0]);
        assert!(f.validate(2).unwrap_err().to_string().contains("scalar z"));
        let bad = FnSpec::Tabulated {
            zs: vec![0.0, 0.0],
            values: vec![vec![0.0], vec![1.0]],
        };
        assert!(bad.validate(1).unwrap_err().to_string().contains("increasing"));
    }
}
