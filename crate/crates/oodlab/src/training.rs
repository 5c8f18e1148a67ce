//! Stratified mini-batch sampling and a small weighted logistic-regression
//! SGD, reproducing the OOD error phenomenology outside the FLD family.
//!
//! Mini-batches hold a fixed fraction `beta` of target samples regardless of
//! the pool sizes. Each pool is drawn without replacement and reshuffled
//! (seeded) when exhausted, so batch composition is exact for every batch.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{optimal_alpha_numeric, ALPHA_COARSE_POINTS, ALPHA_REFINEMENTS};
use crate::mixture::{
    conditional_target_error, sample_balanced, Dataset1d, LabeledDataset, MixtureSpec, Sample,
};
use crate::rng::{rng_from, Seed};
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;

/// Index sets of one mini-batch. Target indices address the target pool, OOD
/// indices the OOD pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub target_indices: Vec<usize>,
    pub ood_indices: Vec<usize>,
}

/// Loss weighting used during training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightMode {
    /// Pool all samples and minimize the plain average loss.
    Agnostic,
    /// Minimize `alpha * target loss + (1 - alpha) * OOD loss` over
    /// beta-stratified batches.
    Weighted { alpha: f64 },
}

/// SGD hyperparameters. `beta` and the weighting mode are ignored in
/// [`WeightMode::Agnostic`] runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub beta: f64,
    pub mode: WeightMode,
    pub seed: Seed,
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidSgdConfig {
                reason: format!("learning_rate must be positive, got {}", self.learning_rate),
            });
        }
        if self.epochs == 0 {
            return Err(Error::InvalidSgdConfig {
                reason: "epochs must be at least 1".to_owned(),
            });
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidSgdConfig {
                reason: "batch_size must be at least 1".to_owned(),
            });
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidSgdConfig {
                reason: format!("beta must lie in [0, 1], got {}", self.beta),
            });
        }
        if let WeightMode::Weighted { alpha } = self.mode {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::AlphaOutOfRange { alpha });
            }
        }
        Ok(())
    }

    /// Target samples per batch: `round(beta * batch_size)`, half-to-even,
    /// fixed once per configuration.
    pub fn target_per_batch(&self) -> usize {
        (self.beta * self.batch_size as f64).round_ties_even() as usize
    }
}

/// A one-dimensional affine model `z = w x + b` trained with logistic loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    pub w: f64,
    pub b: f64,
}

/// Without-replacement index pool that reshuffles when exhausted.
#[derive(Debug)]
struct ShufflePool {
    order: Vec<usize>,
    pos: usize,
    rng: ChaCha8Rng,
}

impl ShufflePool {
    fn new(len: usize, seed: Seed) -> Self {
        let mut pool = ShufflePool {
            order: (0..len).collect(),
            pos: 0,
            rng: rng_from(seed),
        };
        pool.reshuffle();
        pool
    }

    fn reshuffle(&mut self) {
        for i in (1..self.order.len()).rev() {
            let j = (self.rng.next_u64() % (i as u64 + 1)) as usize;
            self.order.swap(i, j);
        }
        self.pos = 0;
    }

    fn draw(&mut self, k: usize, out: &mut Vec<usize>) {
        for _ in 0..k {
            if self.pos == self.order.len() {
                self.reshuffle();
            }
            out.push(self.order[self.pos]);
            self.pos += 1;
        }
    }
}

/// Infinite deterministic stream of beta-stratified batches.
#[derive(Debug)]
pub struct BetaBatches {
    target_pool: ShufflePool,
    ood_pool: ShufflePool,
    per_batch_target: usize,
    per_batch_ood: usize,
}

impl BetaBatches {
    pub fn per_batch_target(&self) -> usize {
        self.per_batch_target
    }

    pub fn per_batch_ood(&self) -> usize {
        self.per_batch_ood
    }
}

impl Iterator for BetaBatches {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        let mut target_indices = Vec::with_capacity(self.per_batch_target);
        let mut ood_indices = Vec::with_capacity(self.per_batch_ood);
        self.target_pool
            .draw(self.per_batch_target, &mut target_indices);
        self.ood_pool.draw(self.per_batch_ood, &mut ood_indices);
        Some(Batch {
            target_indices,
            ood_indices,
        })
    }
}

/// Builds the stratified batch stream for pools of `n` target and `m` OOD
/// samples. Every batch holds exactly `round(beta * B)` target indices and
/// the remainder OOD indices.
pub fn beta_batches(n: usize, m: usize, cfg: &SgdConfig) -> Result<BetaBatches> {
    cfg.validate()?;
    let per_batch_target = cfg.target_per_batch();
    let per_batch_ood = cfg.batch_size - per_batch_target;
    if per_batch_target > n {
        return Err(Error::BatchInfeasible {
            pool: "target",
            need: per_batch_target,
            have: n,
        });
    }
    if per_batch_ood > m {
        return Err(Error::BatchInfeasible {
            pool: "ood",
            need: per_batch_ood,
            have: m,
        });
    }
    Ok(BetaBatches {
        target_pool: ShufflePool::new(n, cfg.seed.derive(0)),
        ood_pool: ShufflePool::new(m, cfg.seed.derive(1)),
        per_batch_target,
        per_batch_ood,
    })
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic-loss gradient over one side of a batch.
fn side_gradient(model: &LinearModel, side: &[(f64, u8)]) -> (f64, f64) {
    let mut dw = 0.0;
    let mut db = 0.0;
    for &(x, y) in side {
        let residual = sigmoid(model.w * x + model.b) - y as f64;
        dw += residual * x;
        db += residual;
    }
    let len = side.len() as f64;
    (dw / len, db / len)
}

/// Gradient of `alpha * mean target loss + (1 - alpha) * mean OOD loss` with
/// respect to `(w, b)`. A side whose weight is zero may be empty; a weighted
/// side may not.
pub fn weighted_minibatch_gradient(
    model: &LinearModel,
    target_batch: &[(f64, u8)],
    ood_batch: &[(f64, u8)],
    alpha: f64,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    if alpha > 0.0 && target_batch.is_empty() {
        return Err(Error::EmptyWeightedSide { side: "target" });
    }
    if alpha < 1.0 && ood_batch.is_empty() {
        return Err(Error::EmptyWeightedSide { side: "ood" });
    }
    let (tw, tb) = if target_batch.is_empty() {
        (0.0, 0.0)
    } else {
        side_gradient(model, target_batch)
    };
    let (ow, ob) = if ood_batch.is_empty() {
        (0.0, 0.0)
    } else {
        side_gradient(model, ood_batch)
    };
    Ok((
        alpha * tw + (1.0 - alpha) * ow,
        alpha * tb + (1.0 - alpha) * ob,
    ))
}

/// Exact conditional target error of the threshold induced by the model.
/// A model with `w = 0` (or a non-finite induced threshold) is uninformative
/// and scores 0.5.
fn model_target_error(spec: &MixtureSpec, model: &LinearModel) -> f64 {
    if model.w == 0.0 {
        return 0.5;
    }
    let c = -model.b / model.w;
    if !c.is_finite() {
        return 0.5;
    }
    let e = conditional_target_error(spec, c).unwrap_or(0.5);
    if model.w > 0.0 {
        e
    } else {
        1.0 - e
    }
}

fn pairs(data: &Dataset1d) -> Vec<(f64, u8)> {
    data.iter().map(|s| (s.x, s.label)).collect()
}

/// Trains the logistic model with SGD and returns the final model plus the
/// exact conditional target error after each epoch.
///
/// Agnostic mode pools both datasets and samples batches uniformly without
/// replacement; weighted mode uses the beta-stratified stream. An epoch is
/// `ceil((n + m) / batch_size)` steps in both modes. Training is
/// single-threaded and deterministic under the configured seed.
pub fn train_logistic(
    spec: &MixtureSpec,
    target: &Dataset1d,
    ood: &Dataset1d,
    cfg: &SgdConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    cfg.validate()?;
    let t = pairs(target);
    let o = pairs(ood);
    let total = t.len() + o.len();
    if total == 0 {
        return Err(Error::EmptyDataset);
    }
    let steps_per_epoch = total.div_ceil(cfg.batch_size);
    let mut model = LinearModel { w: 0.0, b: 0.0 };
    let mut trace = Vec::with_capacity(cfg.epochs);

    match cfg.mode {
        WeightMode::Agnostic => {
            let pooled: Vec<(f64, u8)> = t.iter().chain(o.iter()).copied().collect();
            let mut pool = ShufflePool::new(total, cfg.seed.derive(2));
            let mut indices = Vec::with_capacity(cfg.batch_size);
            let mut batch = Vec::with_capacity(cfg.batch_size);
            for _ in 0..cfg.epochs {
                for _ in 0..steps_per_epoch {
                    indices.clear();
                    pool.draw(cfg.batch_size, &mut indices);
                    batch.clear();
                    batch.extend(indices.iter().map(|&i| pooled[i]));
                    let (dw, db) = side_gradient(&model, &batch);
                    model.w -= cfg.learning_rate * dw;
                    model.b -= cfg.learning_rate * db;
                }
                trace.push(model_target_error(spec, &model));
            }
        }
        WeightMode::Weighted { alpha } => {
            let mut stream = beta_batches(t.len(), o.len(), cfg)?;
            let mut target_batch = Vec::with_capacity(stream.per_batch_target());
            let mut ood_batch = Vec::with_capacity(stream.per_batch_ood());
            for _ in 0..cfg.epochs {
                for _ in 0..steps_per_epoch {
                    let batch = stream.next().expect("stream is infinite");
                    target_batch.clear();
                    target_batch.extend(batch.target_indices.iter().map(|&i| t[i]));
                    ood_batch.clear();
                    ood_batch.extend(batch.ood_indices.iter().map(|&i| o[i]));
                    let (dw, db) =
                        weighted_minibatch_gradient(&model, &target_batch, &ood_batch, alpha)?;
                    model.w -= cfg.learning_rate * dw;
                    model.b -= cfg.learning_rate * db;
                }
                trace.push(model_target_error(spec, &model));
            }
        }
    }

    Ok((model, trace))
}

/// How the loss weight is chosen in a training sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSelection {
    Agnostic,
    Fixed(f64),
    /// Per-m optimum of the analytic weighted error.
    NumericOptimal,
}

/// Aggregated final errors at one OOD count of a training sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSweepPoint {
    pub m: usize,
    pub alpha: Option<f64>,
    pub final_errors: Vec<f64>,
    pub mean: f64,
    pub std_err: f64,
}

/// Per-class prefix of an OOD dataset, keeping the slice exactly balanced.
fn ood_prefix(full: &Dataset1d, m: usize) -> Result<Dataset1d> {
    if !m.is_multiple_of(2) {
        return Err(Error::OddSampleCount {
            which: "ood",
            count: m,
        });
    }
    let mut by_class: [Vec<&Sample<f64>>; 2] = [Vec::new(), Vec::new()];
    for s in full.iter() {
        by_class[s.label as usize].push(s);
    }
    let per_class = m / 2;
    let mut samples = Vec::with_capacity(m);
    for class in &by_class {
        if class.len() < per_class {
            return Err(Error::TooFewSamples {
                got: class.len(),
                min: per_class,
            });
        }
        samples.extend(class.iter().take(per_class).map(|s| (*s).clone()));
    }
    LabeledDataset::new(samples)
}

/// Multi-seed training sweep over an ascending OOD grid.
///
/// Each run draws one fixed target set and one maximal OOD set, then trains
/// at every grid point on the per-class prefix of the OOD set, so curves
/// share data across m. At `m = 0`, weighted selections fall back to
/// all-target batches with `alpha = 1`.
pub fn train_error_sweep(
    spec: &MixtureSpec,
    n: usize,
    m_grid: &[usize],
    runs: usize,
    base: &SgdConfig,
    selection: AlphaSelection,
    master: Seed,
) -> Result<Vec<TrainSweepPoint>> {
    if m_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for i in 1..m_grid.len() {
        if m_grid[i] <= m_grid[i - 1] {
            return Err(Error::GridNotAscending { index: i });
        }
    }
    if runs == 0 {
        return Err(Error::InvalidSgdConfig {
            reason: "runs must be at least 1".to_owned(),
        });
    }
    base.validate()?;

    // The weight at each m is a property of the analytic objective, not of
    // the sampled data, so it is resolved once up front.
    let alphas: Vec<Option<f64>> = m_grid
        .iter()
        .map(|&m| -> Result<Option<f64>> {
            Ok(match selection {
                AlphaSelection::Agnostic => None,
                // With no OOD samples there is nothing to weigh.
                AlphaSelection::Fixed(_) | AlphaSelection::NumericOptimal if m == 0 => Some(1.0),
                AlphaSelection::Fixed(alpha) => Some(alpha),
                AlphaSelection::NumericOptimal => Some(
                    optimal_alpha_numeric(n, m, spec, ALPHA_COARSE_POINTS, ALPHA_REFINEMENTS)?.0,
                ),
            })
        })
        .collect::<Result<_>>()?;

    let m_max = *m_grid.last().expect("grid is nonempty");
    let per_run: Vec<Vec<f64>> = (0..runs)
        .into_par_iter()
        .map(|run| -> Result<Vec<f64>> {
            let run_seed = master.derive(run as u64);
            let target = sample_balanced(spec, n, 0, run_seed.derive(0))?;
            let ood_full = if m_max > 0 {
                Some(sample_balanced(spec, 0, m_max, run_seed.derive(1))?)
            } else {
                None
            };
            let empty = LabeledDataset::new(Vec::new())?;
            let mut finals = Vec::with_capacity(m_grid.len());
            for (idx, &m) in m_grid.iter().enumerate() {
                let ood = match &ood_full {
                    Some(full) if m > 0 => ood_prefix(full, m)?,
                    _ => empty.clone(),
                };
                let mut cfg = *base;
                cfg.seed = run_seed.derive(2).derive(m as u64);
                cfg.mode = match alphas[idx] {
                    None => WeightMode::Agnostic,
                    Some(alpha) => WeightMode::Weighted { alpha },
                };
                if m == 0 {
                    if let WeightMode::Weighted { .. } = cfg.mode {
                        cfg.mode = WeightMode::Weighted { alpha: 1.0 };
                        cfg.beta = 1.0;
                    }
                }
                let (_, trace) = train_logistic(spec, &target, &ood, &cfg)?;
                finals.push(*trace.last().expect("epochs >= 1"));
            }
            Ok(finals)
        })
        .collect::<Result<_>>()?;

    Ok(m_grid
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            let final_errors: Vec<f64> = per_run.iter().map(|r| r[idx]).collect();
            let mean = final_errors.iter().sum::<f64>() / runs as f64;
            let std_err = if runs > 1 {
                let ss = final_errors
                    .iter()
                    .map(|v| (v - mean) * (v - mean))
                    .sum::<f64>();
                (ss / (runs - 1) as f64).sqrt() / (runs as f64).sqrt()
            } else {
                0.0
            };
            TrainSweepPoint {
                m,
                alpha: alphas[idx],
                final_errors,
                mean,
                std_err,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::bayes_error;

    fn spec(mu: f64, sigma: f64, delta: f64) -> MixtureSpec {
        MixtureSpec::new(mu, sigma, delta).unwrap()
    }

    fn cfg(batch_size: usize, beta: f64, seed: u64) -> SgdConfig {
        SgdConfig {
            learning_rate: 0.01,
            epochs: 10,
            batch_size,
            beta,
            mode: WeightMode::Weighted { alpha: 0.5 },
            seed: Seed(seed),
        }
    }

    #[test]
    fn batches_have_exact_composition() {
        let c = cfg(20, 0.5, 1);
        let stream = beta_batches(100, 2000, &c).unwrap();
        for batch in stream.take(500) {
            assert_eq!(batch.target_indices.len(), 10);
            assert_eq!(batch.ood_indices.len(), 10);
        }
        let c75 = cfg(20, 0.75, 1);
        let stream = beta_batches(100, 2000, &c75).unwrap();
        for batch in stream.take(500) {
            assert_eq!(batch.target_indices.len(), 15);
            assert_eq!(batch.ood_indices.len(), 5);
        }
    }

    #[test]
    fn beta_one_is_all_target() {
        let c = cfg(8, 1.0, 2);
        let stream = beta_batches(64, 0, &c).unwrap();
        for batch in stream.take(100) {
            assert_eq!(batch.target_indices.len(), 8);
            assert!(batch.ood_indices.is_empty());
        }
    }

    #[test]
    fn epoch_window_covers_every_target_index() {
        let (n, b, beta) = (64usize, 20usize, 0.5);
        let c = cfg(b, beta, 5);
        let per_batch = c.target_per_batch();
        let window = n.div_ceil(per_batch);
        let stream = beta_batches(n, 200, &c).unwrap();
        let mut counts = vec![0usize; n];
        for batch in stream.take(window) {
            for i in batch.target_indices {
                counts[i] += 1;
            }
        }
        for (i, count) in counts.iter().enumerate() {
            assert!(
                (1..=2).contains(count),
                "index {i} drawn {count} times in one epoch window"
            );
        }
    }

    #[test]
    fn infeasible_composition_names_the_pool() {
        let c = cfg(20, 0.5, 1);
        assert_eq!(
            beta_batches(5, 2000, &c).unwrap_err(),
            Error::BatchInfeasible {
                pool: "target",
                need: 10,
                have: 5
            }
        );
        assert_eq!(
            beta_batches(100, 3, &c).unwrap_err(),
            Error::BatchInfeasible {
                pool: "ood",
                need: 10,
                have: 3
            }
        );
    }

    #[test]
    fn gradient_alpha_one_is_plain_target_gradient() {
        let model = LinearModel { w: 0.3, b: -0.2 };
        let target = [(0.5, 1u8), (-1.0, 0u8), (2.0, 1u8)];
        let ood = [(5.0, 1u8), (6.0, 0u8)];
        let got = weighted_minibatch_gradient(&model, &target, &ood, 1.0).unwrap();
        let want = side_gradient(&model, &target);
        assert_eq!(got, want);
    }

    #[test]
    fn gradient_ignores_alpha_when_sides_match() {
        let model = LinearModel { w: -0.4, b: 0.7 };
        let side = [(1.0, 1u8), (-2.0, 0u8), (0.3, 1u8)];
        let a = weighted_minibatch_gradient(&model, &side, &side, 0.2).unwrap();
        let b = weighted_minibatch_gradient(&model, &side, &side, 0.9).unwrap();
        assert!((a.0 - b.0).abs() <= 1e-15);
        assert!((a.1 - b.1).abs() <= 1e-15);
    }

    #[test]
    fn gradient_is_linear_in_alpha() {
        let model = LinearModel { w: 0.1, b: 0.05 };
        let target = [(0.5, 1u8), (-1.5, 0u8)];
        let ood = [(3.0, 1u8), (4.0, 0u8), (2.0, 1u8)];
        let g1 = weighted_minibatch_gradient(&model, &target, &ood, 1.0).unwrap();
        let g0 = weighted_minibatch_gradient(&model, &target, &ood, 0.0).unwrap();
        for alpha in [0.1, 0.25, 0.5, 0.9] {
            let g = weighted_minibatch_gradient(&model, &target, &ood, alpha).unwrap();
            assert!((g.0 - (alpha * g1.0 + (1.0 - alpha) * g0.0)).abs() <= 1e-12);
            assert!((g.1 - (alpha * g1.1 + (1.0 - alpha) * g0.1)).abs() <= 1e-12);
        }
    }

    #[test]
    fn gradient_rejects_empty_weighted_side() {
        let model = LinearModel { w: 0.0, b: 0.0 };
        let side = [(1.0, 1u8)];
        assert_eq!(
            weighted_minibatch_gradient(&model, &[], &side, 0.5).unwrap_err(),
            Error::EmptyWeightedSide { side: "target" }
        );
        assert_eq!(
            weighted_minibatch_gradient(&model, &side, &[], 0.5).unwrap_err(),
            Error::EmptyWeightedSide { side: "ood" }
        );
        // Zero-weight empty sides are fine.
        assert!(weighted_minibatch_gradient(&model, &side, &[], 1.0).is_ok());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from(Seed(99));
        let mut uniform = |lo: f64, hi: f64| {
            lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / 9_007_199_254_740_992.0
        };
        for _ in 0..100 {
            let model = LinearModel {
                w: uniform(-1.0, 1.0),
                b: uniform(-1.0, 1.0),
            };
            let target: Vec<(f64, u8)> = (0..4)
                .map(|_| (uniform(-5.0, 5.0), (uniform(0.0, 1.0) > 0.5) as u8))
                .collect();
            let ood: Vec<(f64, u8)> = (0..3)
                .map(|_| (uniform(-5.0, 5.0), (uniform(0.0, 1.0) > 0.5) as u8))
                .collect();
            let alpha = uniform(0.0, 1.0);
            let loss = |w: f64, b: f64| {
                let m = LinearModel { w, b };
                let side_loss = |side: &[(f64, u8)]| {
                    side.iter()
                        .map(|&(x, y)| {
                            let z = m.w * x + m.b;
                            // log(1 + exp(-z)) + (1 - y) z, stable form
                            let softplus = if -z > 30.0 { -z } else { (-z).exp().ln_1p() };
                            softplus + (1.0 - y as f64) * z
                        })
                        .sum::<f64>()
                        / side.len() as f64
                };
                alpha * side_loss(&target) + (1.0 - alpha) * side_loss(&ood)
            };
            let (dw, db) = weighted_minibatch_gradient(&model, &target, &ood, alpha).unwrap();
            let h = 1e-6;
            let fdw = (loss(model.w + h, model.b) - loss(model.w - h, model.b)) / (2.0 * h);
            let fdb = (loss(model.w, model.b + h) - loss(model.w, model.b - h)) / (2.0 * h);
            let scale_w = dw.abs().max(1e-3);
            let scale_b = db.abs().max(1e-3);
            assert!((dw - fdw).abs() / scale_w <= 1e-5, "dw {dw} vs fd {fdw}");
            assert!((db - fdb).abs() / scale_b <= 1e-5, "db {db} vs fd {fdb}");
        }
    }

    #[test]
    fn training_is_deterministic() {
        let s = spec(5.0, 10.0, 1.6);
        let target = sample_balanced(&s, 40, 0, Seed(1)).unwrap();
        let ood = sample_balanced(&s, 0, 40, Seed(2)).unwrap();
        let c = SgdConfig {
            learning_rate: 0.01,
            epochs: 5,
            batch_size: 10,
            beta: 0.5,
            mode: WeightMode::Weighted { alpha: 0.7 },
            seed: Seed(77),
        };
        let (m1, t1) = train_logistic(&s, &target, &ood, &c).unwrap();
        let (m2, t2) = train_logistic(&s, &target, &ood, &c).unwrap();
        assert_eq!(m1.w.to_bits(), m2.w.to_bits());
        assert_eq!(m1.b.to_bits(), m2.b.to_bits());
        assert_eq!(t1, t2);
    }

    #[test]
    fn pure_target_training_approaches_bayes() {
        let s = spec(5.0, 10.0, 0.0);
        let target = sample_balanced(&s, 2000, 0, Seed(4)).unwrap();
        let ood = LabeledDataset::new(Vec::new()).unwrap();
        let c = SgdConfig {
            learning_rate: 0.01,
            epochs: 50,
            batch_size: 20,
            beta: 1.0,
            mode: WeightMode::Agnostic,
            seed: Seed(11),
        };
        let (_, trace) = train_logistic(&s, &target, &ood, &c).unwrap();
        let last = *trace.last().unwrap();
        assert!(
            (last - bayes_error(&s)).abs() <= 0.02,
            "final error {last} vs bayes {}",
            bayes_error(&s)
        );
    }

    #[test]
    fn sweep_shapes_and_determinism() {
        let s = spec(5.0, 10.0, 1.6);
        let base = SgdConfig {
            learning_rate: 0.01,
            epochs: 10,
            batch_size: 20,
            beta: 0.5,
            mode: WeightMode::Agnostic,
            seed: Seed(0),
        };
        let grid = [0usize, 20, 100];
        let a =
            train_error_sweep(&s, 40, &grid, 3, &base, AlphaSelection::Agnostic, Seed(5)).unwrap();
        let b =
            train_error_sweep(&s, 40, &grid, 3, &base, AlphaSelection::Agnostic, Seed(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        for point in &a {
            assert_eq!(point.final_errors.len(), 3);
            assert!(point.mean >= 0.0 && point.mean <= 1.0);
        }
        let w = train_error_sweep(
            &s,
            40,
            &grid,
            2,
            &base,
            AlphaSelection::NumericOptimal,
            Seed(5),
        )
        .unwrap();
        assert_eq!(w[0].alpha, Some(1.0));
        assert!(w[1].alpha.unwrap() <= 1.0);
    }
}
