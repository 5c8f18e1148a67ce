//! Closed-form expected target errors and threshold statistics for the
//! Gaussian-mixture family.
//!
//! Everything is evaluated internally in sigma-normalized units (mu/sigma,
//! delta/sigma); the returned threshold statistics are in raw data units.

use crate::error::{Error, Result};
use crate::math;
use crate::mixture::MixtureSpec;

/// Mean and variance of a fitted decision threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdStats {
    pub mean: f64,
    pub variance: f64,
}

/// Squared-bias / variance split of the threshold MSE around the optimal
/// target threshold (which is 0 by symmetry of the target mixture).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseDecomposition {
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Distribution of the pooled (origin-agnostic) threshold:
/// mean `m * delta / (n + m)`, variance `sigma^2 / (n + m)`.
pub fn threshold_stats_agnostic(n: usize, m: usize, spec: &MixtureSpec) -> Result<ThresholdStats> {
    if n + m == 0 {
        return Err(Error::ZeroTotalCount);
    }
    let total = (n + m) as f64;
    Ok(ThresholdStats {
        mean: m as f64 * spec.delta() / total,
        variance: spec.sigma() * spec.sigma() / total,
    })
}

/// Expected target error of the pooled FLD threshold fitted on `n` target and
/// `m` OOD samples:
///
/// `(Phi((m d - (n+m) u) / sqrt((n+m)(n+m+1))) + Phi((-m d - (n+m) u) / sqrt((n+m)(n+m+1)))) / 2`
///
/// with `u = mu/sigma` and `d = delta/sigma`.
pub fn expected_error_agnostic(n: usize, m: usize, spec: &MixtureSpec) -> Result<f64> {
    if n + m == 0 {
        return Err(Error::ZeroTotalCount);
    }
    Ok(agnostic_error_unchecked(n, m, spec))
}

pub(crate) fn agnostic_error_unchecked(n: usize, m: usize, spec: &MixtureSpec) -> f64 {
    let total = (n + m) as f64;
    let scale = (total * (total + 1.0)).sqrt();
    let shift = m as f64 * spec.delta_norm();
    let sep = total * spec.mu_norm();
    0.5 * (math::cdf((shift - sep) / scale) + math::cdf((-shift - sep) / scale))
}

/// Distribution of the alpha-weighted threshold:
/// mean `m (1-a) delta / (a n + (1-a) m)`,
/// variance `sigma^2 (a^2 n + (1-a)^2 m) / (a n + (1-a) m)^2`.
pub fn threshold_stats_weighted(
    n: usize,
    m: usize,
    alpha: f64,
    spec: &MixtureSpec,
) -> Result<ThresholdStats> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    let denom = alpha * n as f64 + (1.0 - alpha) * m as f64;
    if denom <= 0.0 {
        return Err(Error::ZeroEffectiveDenominator { alpha });
    }
    let var_num = alpha * alpha * n as f64 + (1.0 - alpha) * (1.0 - alpha) * m as f64;
    Ok(ThresholdStats {
        mean: m as f64 * (1.0 - alpha) * spec.delta() / denom,
        variance: spec.sigma() * spec.sigma() * var_num / (denom * denom),
    })
}

/// Expected target error of the alpha-weighted FLD threshold.
pub fn expected_error_weighted(n: usize, m: usize, alpha: f64, spec: &MixtureSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    let denom = alpha * n as f64 + (1.0 - alpha) * m as f64;
    if denom <= 0.0 {
        return Err(Error::ZeroEffectiveDenominator { alpha });
    }
    Ok(weighted_error_unchecked(n, m, alpha, spec))
}

pub(crate) fn weighted_error_unchecked(n: usize, m: usize, alpha: f64, spec: &MixtureSpec) -> f64 {
    let denom = alpha * n as f64 + (1.0 - alpha) * m as f64;
    let mean = m as f64 * (1.0 - alpha) * spec.delta_norm() / denom;
    let var =
        (alpha * alpha * n as f64 + (1.0 - alpha) * (1.0 - alpha) * m as f64) / (denom * denom);
    let scale = (1.0 + var).sqrt();
    let mu = spec.mu_norm();
    0.5 * (math::cdf((mean - mu) / scale) + math::cdf((-mean - mu) / scale))
}

/// Threshold MSE around the optimal target threshold 0:
/// `bias^2 + variance` with the agnostic bias and variance.
pub fn mse_decomposition(n: usize, m: usize, spec: &MixtureSpec) -> Result<MseDecomposition> {
    let stats = threshold_stats_agnostic(n, m, spec)?;
    Ok(MseDecomposition {
        bias: stats.mean,
        variance: stats.variance,
        mse: stats.mean * stats.mean + stats.variance,
    })
}

/// Limit of the agnostic error as `m -> infinity`: the threshold concentrates
/// at `delta`, so this is the conditional target risk of a fixed threshold at
/// `delta`.
pub fn limit_error_infinite_ood(spec: &MixtureSpec) -> f64 {
    let lo = math::cdf(spec.delta_norm() - spec.mu_norm());
    let hi = math::cdf(spec.delta_norm() + spec.mu_norm());
    0.5 * (1.0 + lo - hi)
}
