//! End-to-end invariants of the conditional-independence report: the
//! decision/aggregate bookkeeping, determinism, aggregation monotonicity,
//! and the binning-consistency property — each tested bin's plug-in
//! distance stays within ε/2 plus sampling slack of the population
//! distance at the bin's center, estimated by the exact solver on large
//! reference samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wci_core::binning::LipschitzConstants;
use wci_core::ci::{aggregate_type1, aggregate_type2, run_ci_test, CIConfig, DeltaSpec};
use wci_core::datagen::{
    gen_additive_null, measure_conditional_separation, FnSpec, NoiseSpec, ScenarioKind,
    ScenarioSpec,
};
use wci_core::ot::SolverSettings;
use wci_core::two_sample::BoundOutcome;

fn null_scenario(n: usize, seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        kind: ScenarioKind::AdditiveNull,
        n,
        seed,
        d_x: 1,
        d_y: 1,
        z_lower: vec![0.0],
        z_upper: vec![1.0],
        f: FnSpec::affine_1d(0.0, 0.4),
        g: FnSpec::affine_1d(0.4, -0.4),
        noise: NoiseSpec::TruncatedGaussian {
            sigma: 0.1,
            radius: 0.3,
        },
        rho: None,
    }
}

/// Slopes ±0.4 give marginal constants 0.4 and a joint constant 0.4·√2;
/// the marginal route dominates at p = 1, so the cell diameter works out
/// to ε/3.2 and the unit z-range cuts into 8 cells at ε = 0.4.
fn lipschitz() -> LipschitzConstants {
    LipschitzConstants::new(0.4, 0.4, 0.4 * 2f64.sqrt()).unwrap()
}

#[test]
fn per_bin_distance_tracks_the_population_distance_at_the_center() {
    let eps = 0.4;
    let scenario = null_scenario(12_000, 314);
    let data = gen_additive_null(&scenario).unwrap();
    let config = CIConfig {
        p: 1.0,
        eps,
        delta: None,
        lipschitz: lipschitz(),
        bound_params: None,
        min_bin_samples: 3,
        seed: 2718,
        solver: SolverSettings::default(),
        padding: 0.0,
    };
    let report = run_ci_test(&data, &config).unwrap();
    assert_eq!(report.grid.total_cells(), 8);
    assert_eq!(report.tested_bins, 8);

    for record in report.bins.iter().filter(|b| !b.skipped) {
        let center = report.grid.centroid(record.cell);
        // Under the null the population joint/product distance at any z is
        // zero; the reference estimate only carries sampling noise.
        let population =
            measure_conditional_separation(&scenario, &center, 1.0, 1500, 77).unwrap();
        let plugin = record.distance.unwrap();
        assert!(
            (plugin - population).abs() <= eps / 2.0 + 0.15,
            "cell {}: plug-in {plugin} vs population {population}",
            record.cell
        );
    }

    // Report bookkeeping: the global decision and both aggregates must be
    // recomputable from the per-bin records.
    let tested: Vec<_> = report.bins.iter().filter(|b| !b.skipped).collect();
    let reject = tested
        .iter()
        .any(|b| b.distance.unwrap() >= b.threshold);
    assert_eq!(report.reject, reject);
    let t1: Vec<f64> = tested
        .iter()
        .map(|b| b.type1_bound.as_ref().unwrap().value_or_one())
        .collect();
    let t2: Vec<f64> = tested
        .iter()
        .map(|b| b.type2_bound.as_ref().unwrap().value_or_one())
        .collect();
    assert_eq!(report.type1_total, aggregate_type1(&t1));
    assert_eq!(report.type2_total, aggregate_type2(&t2));
    assert_eq!(
        report.tested_bins + report.skipped_bins,
        report.bins.len()
    );
}

#[test]
fn reports_with_bounds_are_byte_identical_across_reruns() {
    let data = gen_additive_null(&null_scenario(900, 55)).unwrap();
    let config = CIConfig {
        p: 1.0,
        eps: 0.4,
        delta: Some(DeltaSpec::Scalar(0.9)),
        lipschitz: lipschitz(),
        bound_params: Some(wci_core::bounds::BoundParams {
            d: Some(2),
            diameter: Some(2f64.sqrt()),
            ..wci_core::bounds::BoundParams::new(1.0)
        }),
        min_bin_samples: 3,
        seed: 99,
        solver: SolverSettings::default(),
        padding: 0.0,
    };
    let a = serde_json::to_vec(&run_ci_test(&data, &config).unwrap()).unwrap();
    let b = serde_json::to_vec(&run_ci_test(&data, &config).unwrap()).unwrap();
    assert_eq!(a, b);

    // The per-bin Type II margins flow through to the records.
    let report = run_ci_test(&data, &config).unwrap();
    for record in report.bins.iter().filter(|r| !r.skipped) {
        assert_eq!(record.delta, Some(0.9));
        match record.type2_bound.as_ref().unwrap() {
            BoundOutcome::Available(v) => assert!((0.0..=1.0).contains(v)),
            BoundOutcome::Unavailable(reason) => assert!(!reason.is_empty()),
        }
    }
}

#[test]
fn aggregation_is_monotone_under_extra_bins() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..500 {
        let len = rng.gen_range(0..6);
        let base: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let extra: f64 = rng.gen();
        let mut extended = base.clone();
        extended.push(extra);
        assert!(aggregate_type1(&extended) >= aggregate_type1(&base) - 1e-15);
        assert!(aggregate_type2(&extended) <= aggregate_type2(&base) + 1e-15);
        assert!((0.0..=1.0).contains(&aggregate_type1(&base)));
        assert!((0.0..=1.0).contains(&aggregate_type2(&base)));
    }
}
