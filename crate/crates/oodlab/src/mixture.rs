//! The shifted two-class Gaussian-mixture family, exact balanced sampling,
//! and the closed-form target risk of a threshold rule.
//!
//! Target classes are N(-mu, sigma^2) and N(+mu, sigma^2); the
//! out-of-distribution (OOD) family is the same pair translated by `delta`.
//! Both share equal class priors of 1/2, which is a family-wide constant
//! rather than a parameter.

use crate::error::{Error, Result};
use crate::math;
use crate::rng::{rng_from, standard_normal, Seed};

/// Parameters of the shifted Gaussian-mixture family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    mu: f64,
    sigma: f64,
    delta: f64,
}

/// Fixed class prior shared by the target and OOD distributions.
pub const CLASS_PRIOR: f64 = 0.5;

impl MixtureSpec {
    pub fn new(mu: f64, sigma: f64, delta: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidMixture {
                reason: format!("mu must be finite and nonnegative, got {mu}"),
            });
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidMixture {
                reason: format!("sigma must be finite and positive, got {sigma}"),
            });
        }
        if !delta.is_finite() {
            return Err(Error::InvalidMixture {
                reason: format!("delta must be finite, got {delta}"),
            });
        }
        Ok(MixtureSpec { mu, sigma, delta })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Class-mean half-separation in sigma-normalized units.
    pub fn mu_norm(&self) -> f64 {
        self.mu / self.sigma
    }

    /// OOD translation in sigma-normalized units.
    pub fn delta_norm(&self) -> f64 {
        self.delta / self.sigma
    }
}

/// Whether a sample was drawn from the target or the OOD distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Target,
    Ood,
}

/// A labeled sample with its origin. `P` is the point type (`f64` for the
/// analytic family, `Vec<f64>` for multivariate data).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<P> {
    pub x: P,
    pub label: u8,
    pub origin: Origin,
}

/// A collection of labeled samples with known origins.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<P> {
    samples: Vec<Sample<P>>,
}

pub type Dataset1d = LabeledDataset<f64>;
pub type DatasetNd = LabeledDataset<Vec<f64>>;

impl<P> LabeledDataset<P> {
    pub fn new(samples: Vec<Sample<P>>) -> Result<Self> {
        for s in &samples {
            if s.label > 1 {
                return Err(Error::InvalidLabel { label: s.label });
            }
        }
        Ok(LabeledDataset { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample<P>] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample<P>> {
        self.samples.iter()
    }

    pub fn count_origin(&self, origin: Origin) -> usize {
        self.samples.iter().filter(|s| s.origin == origin).count()
    }
}

/// Draws an exactly class-balanced dataset: `n_target / 2` target samples per
/// class from N(±mu, sigma^2) and `m_ood / 2` OOD samples per class from
/// N(delta ± mu, sigma^2). Deterministic given the seed.
///
/// Counts must be even because the analytic error formulas assume exact class
/// balance; odd counts are rejected rather than rounded.
pub fn sample_balanced(
    spec: &MixtureSpec,
    n_target: usize,
    m_ood: usize,
    seed: Seed,
) -> Result<Dataset1d> {
    if !n_target.is_multiple_of(2) {
        return Err(Error::OddSampleCount {
            which: "target",
            count: n_target,
        });
    }
    if !m_ood.is_multiple_of(2) {
        return Err(Error::OddSampleCount {
            which: "ood",
            count: m_ood,
        });
    }
    if n_target + m_ood < 2 {
        return Err(Error::TooFewSamples {
            got: n_target + m_ood,
            min: 2,
        });
    }

    let mut rng = rng_from(seed);
    let mut samples = Vec::with_capacity(n_target + m_ood);
    let blocks = [
        (Origin::Target, 0u8, -spec.mu, n_target / 2),
        (Origin::Target, 1u8, spec.mu, n_target / 2),
        (Origin::Ood, 0u8, spec.delta - spec.mu, m_ood / 2),
        (Origin::Ood, 1u8, spec.delta + spec.mu, m_ood / 2),
    ];
    for (origin, label, mean, count) in blocks {
        for _ in 0..count {
            let x = mean + spec.sigma * standard_normal(&mut rng);
            samples.push(Sample { x, label, origin });
        }
    }
    Ok(LabeledDataset { samples })
}

/// Exact target 0-1 risk of the threshold rule "predict 1 iff x > c_hat":
/// `(1 + Phi((c - mu)/sigma) - Phi((c + mu)/sigma)) / 2`.
pub fn conditional_target_error(spec: &MixtureSpec, c_hat: f64) -> Result<f64> {
    if !c_hat.is_finite() {
        return Err(Error::NonFiniteInput {
            name: "c_hat",
            value: c_hat,
        });
    }
    let lo = math::cdf((c_hat - spec.mu) / spec.sigma);
    let hi = math::cdf((c_hat + spec.mu) / spec.sigma);
    Ok(0.5 * (1.0 + lo - hi))
}

/// Bayes optimal target error, `Phi(-mu/sigma)`.
pub fn bayes_error(spec: &MixtureSpec) -> f64 {
    math::cdf(-spec.mu_norm())
}
