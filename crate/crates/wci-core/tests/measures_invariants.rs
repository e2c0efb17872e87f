//! Statistical and structural invariants of the sample-splitting scheme,
//! the moment calculator, and CSV round-tripping.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wci_core::measures::{
    empirical_measure, qth_moment, read_csv, split_for_independence, write_csv, Dataset, Matrix,
};
use wci_core::ot::wasserstein_exact;

fn independent_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let col = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..n).map(|_| vec![rng.gen::<f64>()]).collect()
    };
    let (x, y, z) = (col(&mut rng), col(&mut rng), col(&mut rng));
    Dataset::new(
        Matrix::from_rows(&x).unwrap(),
        Matrix::from_rows(&y).unwrap(),
        Matrix::from_rows(&z).unwrap(),
    )
    .unwrap()
}

/// Under an independent law, the product-paired empirical is distributed
/// like a joint-paired empirical of fresh rows, so over many seeded splits
/// the mean distance between the split's two measures must match the mean
/// distance between two disjoint joint-block empiricals.
#[test]
fn split_statistic_matches_disjoint_blocks_over_1000_seeds() {
    let n = 60;
    let data = independent_dataset(n, 99);
    let k = n / 3;
    let mut split_distances = Vec::with_capacity(1000);
    let mut block_distances = Vec::with_capacity(1000);
    for seed in 0..1000u64 {
        let split = split_for_independence(&data, seed).unwrap();
        let d = wasserstein_exact(split.joint(), split.product(), 1.0)
            .unwrap()
            .distance;
        split_distances.push(d);

        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD_EF01_2345_6789);
        order.shuffle(&mut rng);
        let joint_block = |rows: &[usize]| {
            empirical_measure(&rows.iter().map(|&i| data.joint_row(i)).collect::<Vec<_>>())
                .unwrap()
        };
        let a = joint_block(&order[0..k]);
        let b = joint_block(&order[k..2 * k]);
        block_distances.push(wasserstein_exact(&a, &b, 1.0).unwrap().distance);
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64], m: f64| {
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
    };
    let (ma, mb) = (mean(&split_distances), mean(&block_distances));
    let se = ((var(&split_distances, ma) + var(&block_distances, mb)) / 1000.0).sqrt();
    assert!(
        (ma - mb).abs() <= 3.0 * se,
        "split mean {ma} vs disjoint-block mean {mb}, 3·SE = {}",
        3.0 * se
    );
}

#[test]
fn split_blocks_never_reuse_a_row_and_sizes_are_exact() {
    for n in [3usize, 10, 31, 100] {
        let data = independent_dataset(n, 7);
        let split = split_for_independence(&data, 5).unwrap();
        let k = n / 3;
        assert_eq!(split.k(), k);
        assert_eq!(split.joint().len(), k);
        assert_eq!(split.product().len(), k);
        for i in 0..k {
            assert!((split.joint().weight(i) - 1.0 / k as f64).abs() < 1e-15);
        }
    }
}

#[test]
fn qth_moment_is_dominated_by_the_largest_norm_and_monotone_in_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..200 {
        let n = rng.gen_range(1..=20);
        let d = rng.gen_range(1..=3);
        // Offset by 1 so every atom has norm ≥ 1, where monotonicity holds.
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut v: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0).collect();
                v[0] += 1.0;
                v
            })
            .collect();
        let mu = empirical_measure(&points).unwrap();
        let max_norm = points
            .iter()
            .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0_f64, f64::max);
        let mut last = 0.0;
        for q in [1.0, 2.0, 4.0, 8.0] {
            let m = qth_moment(&mu, q).unwrap();
            assert!(m <= max_norm + 1e-12, "moment {m} above max norm {max_norm}");
            assert!(m >= last - 1e-12, "moment fell from {last} to {m} at q = {q}");
            last = m;
        }
    }
}

#[test]
fn csv_round_trip_preserves_every_float() {
    let data = independent_dataset(37, 55);
    let mut buffer = Vec::new();
    write_csv(&data, &mut buffer).unwrap();
    let back = read_csv(buffer.as_slice()).unwrap();
    assert_eq!(back.n(), data.n());
    for i in 0..data.n() {
        assert_eq!(back.x_row(i), data.x_row(i));
        assert_eq!(back.y_row(i), data.y_row(i));
        assert_eq!(back.z_row(i), data.z_row(i));
    }
}
