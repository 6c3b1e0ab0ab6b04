//! Oracle equivalence of the two purity estimators: repeated-run means must
//! track the exact density-matrix purity, and the swap-test shot bound must
//! deliver its advertised coverage.

use entrobench::ansatz::{build_circuit, evolve_noisy};
use entrobench::seeding::{derive_seed, seeded_rng};
use entrobench::shadows::estimate_purity_randomized;
use entrobench::sim::{DensityMatrix, NoiseModel, ReadoutError};
use entrobench::swaptest::{purity_estimate_swap, sample_bound_swap, BellSampler};

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Pure output, a mid-mixed output, and the maximally mixed state at n = 2.
fn reference_states() -> Vec<(&'static str, DensityMatrix)> {
    let pure = evolve_noisy(
        &build_circuit(2, 4, 41).unwrap(),
        &NoiseModel::NOISELESS,
    )
    .unwrap()
    .pop()
    .unwrap();
    let mixed = evolve_noisy(
        &build_circuit(2, 10, 42).unwrap(),
        &NoiseModel::depolarizing(0.008, 0.054).unwrap(),
    )
    .unwrap()
    .pop()
    .unwrap();
    let mm = DensityMatrix::maximally_mixed(2).unwrap();
    vec![("pure", pure), ("mid-mixed", mixed), ("maximally mixed", mm)]
}

#[test]
fn shadows_mean_tracks_exact_purity() {
    for (label, rho) in reference_states() {
        let exact = rho.purity();
        let estimates: Vec<f64> = (0..200)
            .map(|run| {
                let mut rng = seeded_rng(derive_seed(500, &[run]));
                estimate_purity_randomized(&rho, 100, 20, &mut rng, ReadoutError::NONE).unwrap()
            })
            .collect();
        let (mean, stderr) = mean_and_stderr(&estimates);
        assert!(
            (mean - exact).abs() <= 3.0 * stderr,
            "{label}: mean {mean} vs exact {exact} (stderr {stderr})"
        );
    }
}

#[test]
fn swap_mean_tracks_exact_purity() {
    for (label, rho) in reference_states() {
        let exact = rho.purity();
        let sampler = BellSampler::new(&rho, None).unwrap();
        let estimates: Vec<f64> = (0..200)
            .map(|run| {
                let mut rng = seeded_rng(derive_seed(600, &[run]));
                purity_estimate_swap(&sampler.sample_many(2000, &mut rng)).unwrap()
            })
            .collect();
        let (mean, stderr) = mean_and_stderr(&estimates);
        assert!(
            (mean - exact).abs() <= 3.0 * stderr,
            "{label}: mean {mean} vs exact {exact} (stderr {stderr})"
        );
    }
}

#[test]
fn swap_hoeffding_bound_delivers_coverage() {
    // At the bound for (eps, delta) = (0.1, 0.05), the failure frequency over
    // 1000 trials on the 1-qubit maximally mixed state must stay below
    // delta plus two binomial standard deviations.
    let eps = 0.1;
    let delta = 0.05;
    let shots = sample_bound_swap(eps, delta).unwrap() as usize;
    assert_eq!(shots, 738);

    let rho = DensityMatrix::maximally_mixed(1).unwrap();
    let sampler = BellSampler::new(&rho, None).unwrap();
    let trials = 1000;
    let mut failures = 0usize;
    let mut rng = seeded_rng(700);
    for _ in 0..trials {
        let est = purity_estimate_swap(&sampler.sample_many(shots, &mut rng)).unwrap();
        if (est - 0.5).abs() >= eps {
            failures += 1;
        }
    }
    let rate = failures as f64 / trials as f64;
    let slack = 2.0 * (delta * (1.0 - delta) / trials as f64).sqrt();
    assert!(
        rate <= delta + slack,
        "failure rate {rate} exceeds {delta} + {slack}"
    );
}

#[test]
fn swap_variance_grows_with_mixedness() {
    // Same budget, two states: the swap estimator scatters more on the mixed
    // state, the shadows estimator scatters more on the pure one.
    let noise = NoiseModel::depolarizing(0.008, 0.054).unwrap();
    let states = evolve_noisy(&build_circuit(3, 12, 43).unwrap(), &noise).unwrap();
    let near_pure = &states[0];
    let mixed = &states[11];

    let std_of = |rho: &DensityMatrix, tag: u64| {
        let sampler = BellSampler::new(rho, None).unwrap();
        let estimates: Vec<f64> = (0..20)
            .map(|run| {
                let mut rng = seeded_rng(derive_seed(tag, &[run]));
                purity_estimate_swap(&sampler.sample_many(24_300, &mut rng)).unwrap()
            })
            .collect();
        let (mean, _) = mean_and_stderr(&estimates);
        (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 19.0).sqrt()
    };
    let shallow = std_of(near_pure, 800);
    let deep = std_of(mixed, 801);
    assert!(
        deep > shallow,
        "swap std at depth 12 ({deep}) not above depth 1 ({shallow})"
    );
}
