//! Seeded, replicable Monte-Carlo estimation of expected target error and
//! threshold MSE.
//!
//! Replicate `r` of a run depends only on `(master_seed, r)`, never on
//! execution order: replicates may run on any number of threads and the
//! reduction is performed sequentially in ascending replicate order, so
//! results are bit-identical regardless of parallelism.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fld::{fit_agnostic_1d, fit_weighted_1d, ThresholdHypothesis};
use crate::mixture::{conditional_target_error, sample_balanced, MixtureSpec};
use crate::rng::Seed;

/// How a fitted threshold is scored against the target distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Exact conditional 0-1 risk of the fitted threshold
    /// (Rao-Blackwellized; no test-set noise).
    ConditionalExact,
    /// Empirical 0-1 error on a fresh balanced target test set.
    EmpiricalTestSet { test_n: usize },
}

/// Replicate protocol for a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub replicates: usize,
    pub master_seed: Seed,
    pub estimator: Estimator,
}

impl McConfig {
    pub fn new(replicates: usize, master_seed: Seed, estimator: Estimator) -> Result<Self> {
        if replicates < 2 {
            return Err(Error::TooFewReplicates {
                got: replicates,
                min: 2,
            });
        }
        if let Estimator::EmpiricalTestSet { test_n } = estimator {
            if test_n < 2 || !test_n.is_multiple_of(2) {
                return Err(Error::InvalidTestSetSize { got: test_n });
            }
        }
        Ok(McConfig {
            replicates,
            master_seed,
            estimator,
        })
    }
}

/// Monte-Carlo estimate with its normal-approximation 95% confidence
/// interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub replicates: usize,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
}

/// Seed for replicate `r` of a run with the given master seed.
pub fn replicate_seed(master: Seed, replicate: u64) -> Seed {
    master.derive(replicate)
}

fn score(
    spec: &MixtureSpec,
    hypothesis: &ThresholdHypothesis,
    estimator: Estimator,
    replicate: Seed,
) -> Result<f64> {
    match estimator {
        Estimator::ConditionalExact => conditional_target_error(spec, hypothesis.threshold()),
        Estimator::EmpiricalTestSet { test_n } => {
            let test = sample_balanced(spec, test_n, 0, replicate.derive(1))?;
            let wrong = test
                .iter()
                .filter(|s| hypothesis.predict(s.x) != s.label)
                .count();
            Ok(wrong as f64 / test_n as f64)
        }
    }
}

fn run_replicates(
    cfg: &McConfig,
    replicate_value: impl Fn(Seed) -> Result<f64> + Sync,
) -> Result<McEstimate> {
    let values: Vec<f64> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| replicate_value(replicate_seed(cfg.master_seed, r as u64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(reduce(&values))
}

/// Sequential reduction in ascending replicate order.
fn reduce(values: &[f64]) -> McEstimate {
    let r = values.len();
    let mean = values.iter().sum::<f64>() / r as f64;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    let std_err = (ss / (r - 1) as f64).sqrt() / (r as f64).sqrt();
    McEstimate {
        mean,
        std_err,
        replicates: r,
        ci95_lo: mean - 1.96 * std_err,
        ci95_hi: mean + 1.96 * std_err,
    }
}

/// Monte-Carlo estimate of the expected target error of the pooled
/// (origin-agnostic) FLD fit on `n` target and `m` OOD samples.
pub fn mc_expected_error_agnostic(
    n: usize,
    m: usize,
    spec: &MixtureSpec,
    cfg: &McConfig,
) -> Result<McEstimate> {
    run_replicates(cfg, |seed| {
        let data = sample_balanced(spec, n, m, seed)?;
        let h = fit_agnostic_1d(&data)?;
        score(spec, &h, cfg.estimator, seed)
    })
}

/// Monte-Carlo estimate of the expected target error of the alpha-weighted
/// FLD fit.
pub fn mc_expected_error_weighted(
    n: usize,
    m: usize,
    alpha: f64,
    spec: &MixtureSpec,
    cfg: &McConfig,
) -> Result<McEstimate> {
    run_replicates(cfg, |seed| {
        let data = sample_balanced(spec, n, m, seed)?;
        let h = fit_weighted_1d(&data, alpha)?;
        score(spec, &h, cfg.estimator, seed)
    })
}

/// Monte-Carlo estimate of the threshold MSE around the optimal target
/// threshold 0, for the pooled fit.
pub fn mc_threshold_mse(
    n: usize,
    m: usize,
    spec: &MixtureSpec,
    cfg: &McConfig,
) -> Result<McEstimate> {
    run_replicates(cfg, |seed| {
        let data = sample_balanced(spec, n, m, seed)?;
        let h = fit_agnostic_1d(&data)?;
        Ok(h.threshold() * h.threshold())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::rng::{mix64, rng_from};
    use rand_chacha::rand_core::RngCore;

    fn spec(mu: f64, sigma: f64, delta: f64) -> MixtureSpec {
        MixtureSpec::new(mu, sigma, delta).unwrap()
    }

    fn exact_cfg(replicates: usize, seed: u64) -> McConfig {
        McConfig::new(replicates, Seed(seed), Estimator::ConditionalExact).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, Seed(0), Estimator::ConditionalExact).is_err());
        assert!(McConfig::new(10, Seed(0), Estimator::EmpiricalTestSet { test_n: 3 }).is_err());
        assert!(McConfig::new(10, Seed(0), Estimator::EmpiricalTestSet { test_n: 0 }).is_err());
        assert!(McConfig::new(2, Seed(0), Estimator::EmpiricalTestSet { test_n: 2 }).is_ok());
    }

    #[test]
    fn agnostic_mc_matches_analytic_without_ood() {
        let s = spec(5.0, 10.0, 1.6);
        let cfg = exact_cfg(20_000, 11);
        let est = mc_expected_error_agnostic(100, 0, &s, &cfg).unwrap();
        let want = analytic::expected_error_agnostic(100, 0, &s).unwrap();
        assert!(
            (est.mean - want).abs() <= 3.0 * est.std_err,
            "mc {} vs analytic {want} (se {})",
            est.mean,
            est.std_err
        );
    }

    #[test]
    fn agnostic_mc_matches_analytic_with_ood() {
        let s = spec(5.0, 10.0, 1.6);
        let cfg = exact_cfg(20_000, 13);
        let est = mc_expected_error_agnostic(100, 100, &s, &cfg).unwrap();
        let want = analytic::expected_error_agnostic(100, 100, &s).unwrap();
        assert!(
            (est.mean - want).abs() <= 3.0 * est.std_err,
            "mc {} vs analytic {want} (se {})",
            est.mean,
            est.std_err
        );
    }

    #[test]
    fn identical_seeds_give_identical_estimates() {
        let s = spec(5.0, 10.0, 1.6);
        let cfg = exact_cfg(500, 99);
        let a = mc_expected_error_agnostic(20, 10, &s, &cfg).unwrap();
        let b = mc_expected_error_agnostic(20, 10, &s, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimates_do_not_depend_on_thread_count() {
        let s = spec(5.0, 10.0, 1.6);
        let cfg = exact_cfg(2_000, 4242);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mc_expected_error_agnostic(50, 20, &s, &cfg).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| mc_expected_error_agnostic(50, 20, &s, &cfg).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn weighted_half_is_bitwise_equal_to_agnostic() {
        let s = spec(5.0, 10.0, 1.6);
        let cfg = exact_cfg(1_000, 7);
        let agnostic = mc_expected_error_agnostic(40, 20, &s, &cfg).unwrap();
        let weighted = mc_expected_error_weighted(40, 20, 0.5, &s, &cfg).unwrap();
        assert_eq!(agnostic, weighted);
    }

    #[test]
    fn weighted_alpha_one_reproduces_no_ood_error() {
        let s = spec(5.0, 10.0, 1.6);
        let cfg = exact_cfg(5_000, 21);
        let est = mc_expected_error_weighted(100, 400, 1.0, &s, &cfg).unwrap();
        let want = analytic::expected_error_agnostic(100, 0, &s).unwrap();
        assert!(
            (est.mean - want).abs() <= 3.0 * est.std_err,
            "mc {} vs analytic {want}",
            est.mean
        );
    }

    #[test]
    fn weighted_optimal_low_sample_regime_improves_with_ood() {
        // n = 4, mu = 1, sigma = 1: with the per-m optimal weight, 32 OOD
        // samples do not hurt relative to none.
        let s = spec(1.0, 1.0, 1.0);
        let cfg = exact_cfg(20_000, 404);
        let (alpha, _) = crate::experiments::optimal_alpha_numeric(4, 32, &s, 100, 2).unwrap();
        let with_ood = mc_expected_error_weighted(4, 32, alpha, &s, &cfg).unwrap();
        let without = mc_expected_error_weighted(4, 0, 1.0, &s, &cfg).unwrap();
        let combined_se = (with_ood.std_err.powi(2) + without.std_err.powi(2)).sqrt();
        assert!(
            with_ood.mean <= without.mean + 3.0 * combined_se,
            "alpha*={alpha}: {} > {} + 3se",
            with_ood.mean,
            without.mean
        );
    }

    #[test]
    fn threshold_mse_matches_analytic() {
        let s = spec(5.0, 10.0, 1.8);
        let cfg = exact_cfg(20_000, 31);

        let no_ood = mc_threshold_mse(100, 0, &s, &cfg).unwrap();
        let want0 = analytic::mse_decomposition(100, 0, &s).unwrap().mse;
        assert!(
            (no_ood.mean - want0).abs() <= 3.0 * no_ood.std_err,
            "mse {} vs {want0}",
            no_ood.mean
        );

        let with_ood = mc_threshold_mse(100, 400, &s, &cfg).unwrap();
        let want = analytic::mse_decomposition(100, 400, &s).unwrap().mse;
        assert!(
            (with_ood.mean - want).abs() <= 3.0 * with_ood.std_err,
            "mse {} vs {want}",
            with_ood.mean
        );
    }

    #[test]
    fn two_replicates_still_produce_an_interval() {
        let s = spec(5.0, 10.0, 1.8);
        let cfg = exact_cfg(2, 1);
        let est = mc_threshold_mse(10, 4, &s, &cfg).unwrap();
        assert!(est.std_err.is_finite() && est.std_err >= 0.0);
        assert!(est.ci95_lo <= est.mean && est.mean <= est.ci95_hi);
    }

    #[test]
    fn exact_estimator_never_noisier_than_test_set() {
        let mut picker = rng_from(Seed(555));
        for _ in 0..10 {
            let n = 2 * (1 + (picker.next_u64() % 50) as usize);
            let m = 2 * ((picker.next_u64() % 50) as usize);
            let mu = 0.5 + (picker.next_u64() % 500) as f64 / 100.0;
            let sigma = 0.5 + (picker.next_u64() % 1000) as f64 / 100.0;
            let delta = (picker.next_u64() % 300) as f64 / 100.0;
            let s = spec(mu, sigma, delta);
            let master = Seed(mix64(picker.next_u64()));

            let exact = McConfig::new(100, master, Estimator::ConditionalExact).unwrap();
            let test =
                McConfig::new(100, master, Estimator::EmpiricalTestSet { test_n: 10_000 }).unwrap();
            let e = mc_expected_error_agnostic(n, m, &s, &exact).unwrap();
            let t = mc_expected_error_agnostic(n, m, &s, &test).unwrap();
            assert!(
                e.std_err <= t.std_err,
                "exact se {} > test-set se {} (n={n}, m={m})",
                e.std_err,
                t.std_err
            );
        }
    }

    #[test]
    fn interval_covers_the_analytic_value() {
        let s = spec(5.0, 10.0, 1.6);
        let want = analytic::expected_error_agnostic(20, 20, &s).unwrap();
        let mut covered = 0;
        let trials = 200;
        for i in 0..trials {
            let cfg = exact_cfg(400, 10_000 + i);
            let est = mc_expected_error_agnostic(20, 20, &s, &cfg).unwrap();
            if est.ci95_lo <= want && want <= est.ci95_hi {
                covered += 1;
            }
        }
        assert!(covered >= 180, "coverage {covered}/{trials}");
    }
}
