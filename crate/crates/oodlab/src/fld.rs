//! Fisher's Linear Discriminant estimators.
//!
//! Three fits are provided: the origin-agnostic pooled 1-D threshold, the
//! alpha-weighted 1-D threshold that discounts OOD samples, and the general
//! d-dimensional rule with a pooled within-class ML covariance. The weighted
//! fit at alpha = 1/2 reproduces the agnostic fit bit-for-bit because both
//! paths accumulate per-origin partial sums before combining.

use crate::error::{Error, Result};
use crate::mixture::{Dataset1d, DatasetNd, Origin};

/// 1-D threshold classifier: predict class 1 iff `x > c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdHypothesis {
    c: f64,
}

impl ThresholdHypothesis {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFiniteInput {
                name: "c",
                value: c,
            });
        }
        Ok(ThresholdHypothesis { c })
    }

    pub fn threshold(&self) -> f64 {
        self.c
    }

    /// Boundary points classify as 0; the rule is a strict inequality.
    pub fn predict(&self, x: f64) -> u8 {
        u8::from(x > self.c)
    }
}

/// Linear discriminant in d dimensions: predict class 1 iff `omega . x > c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDiscriminant {
    omega: Vec<f64>,
    c: f64,
}

impl LinearDiscriminant {
    pub fn projection(&self) -> &[f64] {
        &self.omega
    }

    pub fn threshold(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        if x.len() != self.omega.len() {
            return Err(Error::DimensionMismatch {
                expected: self.omega.len(),
                got: x.len(),
            });
        }
        let proj: f64 = self.omega.iter().zip(x).map(|(w, v)| w * v).sum();
        Ok(u8::from(proj > self.c))
    }
}

/// Per-class sums split by origin, the shared accumulator for both 1-D fits.
#[derive(Default, Clone, Copy)]
struct ClassSums {
    target_sum: f64,
    target_count: usize,
    ood_sum: f64,
    ood_count: usize,
}

fn accumulate_1d(data: &Dataset1d) -> [ClassSums; 2] {
    let mut sums = [ClassSums::default(), ClassSums::default()];
    for s in data.iter() {
        let acc = &mut sums[s.label as usize];
        match s.origin {
            Origin::Target => {
                acc.target_sum += s.x;
                acc.target_count += 1;
            }
            Origin::Ood => {
                acc.ood_sum += s.x;
                acc.ood_count += 1;
            }
        }
    }
    sums
}

/// Pooled 1-D fit that ignores origins: class means over all samples, then
/// the midpoint threshold `c = (mu0 + mu1) / 2`.
pub fn fit_agnostic_1d(data: &Dataset1d) -> Result<ThresholdHypothesis> {
    let sums = accumulate_1d(data);
    let mut means = [0.0; 2];
    for (k, acc) in sums.iter().enumerate() {
        let count = acc.target_count + acc.ood_count;
        if count == 0 {
            return Err(Error::ClassAbsent { class: k as u8 });
        }
        means[k] = (acc.target_sum + acc.ood_sum) / count as f64;
    }
    ThresholdHypothesis::new(0.5 * (means[0] + means[1]))
}

/// Alpha-weighted 1-D fit: target samples carry weight `alpha`, OOD samples
/// `1 - alpha`, so
/// `mu_k = (alpha * sum_target + (1-alpha) * sum_ood) / (alpha * n_k + (1-alpha) * m_k)`.
pub fn fit_weighted_1d(data: &Dataset1d, alpha: f64) -> Result<ThresholdHypothesis> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    let sums = accumulate_1d(data);
    let mut means = [0.0; 2];
    for (k, acc) in sums.iter().enumerate() {
        if acc.target_count + acc.ood_count == 0 {
            return Err(Error::ClassAbsent { class: k as u8 });
        }
        let denom = alpha * acc.target_count as f64 + (1.0 - alpha) * acc.ood_count as f64;
        if denom == 0.0 {
            return Err(Error::ZeroEffectiveWeight { class: k as u8 });
        }
        means[k] = (alpha * acc.target_sum + (1.0 - alpha) * acc.ood_sum) / denom;
    }
    ThresholdHypothesis::new(0.5 * (means[0] + means[1]))
}

/// d-dimensional FLD fit ignoring origins.
///
/// Uses maximum-likelihood estimates throughout: per-class means, the pooled
/// within-class covariance divided by the total count (not count - 2), and
/// empirical class priors. `ridge * I` is added to the covariance before
/// inversion; with `ridge = 0` a singular covariance is an error.
pub fn fit_multivariate(data: &DatasetNd, ridge: f64) -> Result<LinearDiscriminant> {
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(Error::NegativeRidge { ridge });
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = data.samples()[0].x.len();
    for s in data.iter() {
        if s.x.len() != dim {
            return Err(Error::InconsistentDimensions {
                first: dim,
                other: s.x.len(),
            });
        }
    }

    let total = data.len();
    let mut counts = [0usize; 2];
    let mut means = [vec![0.0; dim], vec![0.0; dim]];
    for s in data.iter() {
        counts[s.label as usize] += 1;
        for (acc, v) in means[s.label as usize].iter_mut().zip(&s.x) {
            *acc += v;
        }
    }
    for (k, count) in counts.iter().enumerate() {
        if *count == 0 {
            return Err(Error::ClassAbsent { class: k as u8 });
        }
        for acc in means[k].iter_mut() {
            *acc /= *count as f64;
        }
    }

    // Pooled within-class MLE covariance plus ridge.
    let mut cov = vec![vec![0.0; dim]; dim];
    for s in data.iter() {
        let mu = &means[s.label as usize];
        for i in 0..dim {
            let di = s.x[i] - mu[i];
            for j in 0..dim {
                cov[i][j] += di * (s.x[j] - mu[j]);
            }
        }
    }
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= total as f64;
        }
    }
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] += ridge;
    }

    let diff: Vec<f64> = means[1].iter().zip(&means[0]).map(|(a, b)| a - b).collect();
    let omega = solve_spd(cov, diff)?;

    let mid_proj: f64 = omega
        .iter()
        .enumerate()
        .map(|(i, w)| w * 0.5 * (means[0][i] + means[1][i]))
        .sum();
    let prior0 = counts[0] as f64 / total as f64;
    let prior1 = counts[1] as f64 / total as f64;
    let c = mid_proj + (prior0 / prior1).ln();

    if omega.iter().all(|w| *w == 0.0) {
        return Err(Error::SingularCovariance);
    }
    Ok(LinearDiscriminant { omega, c })
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve_spd(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularCovariance);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}
