use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use twinsep::fit::{fit_constrained, FitOptions, Objective, Weighting};
use twinsep::scan::{scan_with_checkpoints, CheckpointSpec};
use twinsep::sieve::{prime_stream, SieveConfig};
use twinsep::stats::{FrequencyTable, SeparationHistogram};

fn geometric_histogram(m: f64, draws: usize, seed: u64) -> SeparationHistogram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Geometric::new(1.0 - (-m).exp()).unwrap();
    (0..draws).map(|_| dist.sample(&mut rng)).collect()
}

#[test]
fn geometric_recovery_within_three_errors() {
    for (i, m) in [0.05, 0.1, 0.2].into_iter().enumerate() {
        let hist = geometric_histogram(m, 1_000_000, 11 + i as u64);
        let fit = fit_constrained(&hist.to_frequency_table().unwrap(), &FitOptions::default()).unwrap();
        let z = (fit.m - m) / fit.std_error;
        assert!(z.abs() < 3.0, "m0 = {m}: fitted {} ± {} (z = {z:.2})", fit.m, fit.std_error);
    }
}

#[test]
fn standard_error_shrinks_with_sample_size() {
    for m in [0.05, 0.1, 0.2] {
        let small = geometric_histogram(m, 10_000, 5);
        let large = geometric_histogram(m, 1_000_000, 5);
        let opts = FitOptions::default();
        let e_small = fit_constrained(&small.to_frequency_table().unwrap(), &opts).unwrap().std_error;
        let e_large = fit_constrained(&large.to_frequency_table().unwrap(), &opts).unwrap().std_error;
        assert!(e_small > 0.0 && e_large > 0.0);
        assert!(e_large < e_small, "m = {m}: {e_large} vs {e_small}");
    }
}

#[test]
fn exact_exponential_data_recovered() {
    for m in [0.05, 0.1, 0.2] {
        let table =
            FrequencyTable::from_density((0..=1000u64).map(|s| (s, (-m * s as f64).exp()))).unwrap();
        let fit = fit_constrained(&table, &FitOptions::default()).unwrap();
        assert!((fit.m - m).abs() < 1e-3, "{m}: {}", fit.m);
    }
}

fn real_table(twins: u64, limit: u64) -> FrequencyTable {
    let primes = prime_stream(SieveConfig::new(limit).unwrap()).unwrap();
    let out = scan_with_checkpoints(primes, &[CheckpointSpec::TwinCount(twins)], limit).unwrap();
    out.snapshots[0].histogram.to_frequency_table().unwrap()
}

#[test]
fn dropping_the_tail_bin_never_lowers_the_slope() {
    for (twins, limit) in [(1_000, 79_561), (10_000, 1_260_991), (100_000, 18_409_201)] {
        let table = real_table(twins, limit);
        for weighting in [Weighting::CountWeighted, Weighting::Unweighted] {
            let opts = FitOptions::default().with_weighting(weighting);
            let full = fit_constrained(&table, &opts).unwrap();
            let trimmed = fit_constrained(&table.without_last_bin().unwrap(), &opts).unwrap();
            assert!(
                trimmed.m >= full.m,
                "{twins} twins, {weighting:?}: {} < {}",
                trimmed.m,
                full.m
            );
        }
    }
}

#[test]
fn real_data_optimum_is_a_local_minimum() {
    let table = real_table(10_000, 1_260_991);
    for weighting in [Weighting::CountWeighted, Weighting::Unweighted] {
        let fit = fit_constrained(&table, &FitOptions::default().with_weighting(weighting)).unwrap();
        let objective = Objective::new(&table, weighting).unwrap();
        for rel in [1e-6, 1e-4] {
            let d = rel * fit.m;
            assert!(objective.value(fit.m + d) >= fit.objective);
            assert!(objective.value(fit.m - d) >= fit.objective);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimum_is_stationary_and_minimal(
        seps in prop::collection::vec(0u64..60, 2..400),
        uniform in any::<bool>(),
    ) {
        let hist: SeparationHistogram = seps.iter().copied().collect();
        prop_assume!(hist.bins() >= 2);
        let table = hist.to_frequency_table().unwrap();
        let weighting = if uniform { Weighting::Unweighted } else { Weighting::CountWeighted };
        let fit = fit_constrained(&table, &FitOptions::default().with_weighting(weighting)).unwrap();
        let objective = Objective::new(&table, weighting).unwrap();
        prop_assert!(fit.m > 0.0);
        prop_assert!((fit.m * fit.mean_separation - 1.0).abs() < 1e-14);
        prop_assert!(fit.bins_used >= 2);
        for rel in [1e-6, 1e-4] {
            let d = rel * fit.m;
            prop_assert!(objective.value(fit.m + d) >= fit.objective * (1.0 - 1e-14));
            prop_assert!(objective.value(fit.m - d) >= fit.objective * (1.0 - 1e-14));
        }
    }
}
