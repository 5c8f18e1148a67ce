//! Analytic and Monte-Carlo study of how the target-task generalization
//! error of Fisher's Linear Discriminant depends on the number of
//! out-of-distribution (OOD) training samples, for a shifted Gaussian-mixture
//! family.
//!
//! The library computes the closed-form expected target error of the pooled
//! and alpha-weighted threshold estimators, validates the formulas by seeded
//! Monte-Carlo simulation, classifies the resulting error curves (including
//! the dip-then-rise pattern where a few OOD samples help and many hurt),
//! evaluates the domain-adaptation upper bound with a numerically computed
//! H-divergence, and reproduces the phenomenon with a small logistic-SGD
//! trainer fed by a stratified mini-batch sampler.
//!
//! All randomized operations are pure functions of an explicit [`rng::Seed`]
//! and produce bit-identical results regardless of thread count.

pub mod analytic;
pub mod bound;
mod error;
pub mod experiments;
pub mod fld;
pub mod math;
pub mod mixture;
pub mod montecarlo;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
