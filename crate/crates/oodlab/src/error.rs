use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input `{name}` must be finite, got {value}")]
    NonFiniteInput { name: &'static str, value: f64 },

    #[error("invalid interval [{lo}, {hi}]: bounds must be finite with lo <= hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("grid needs at least {min} points, got {got}")]
    TooFewGridPoints { got: usize, min: usize },

    #[error("objective evaluated to a non-finite value at {x}")]
    ObjectiveNotFinite { x: f64 },

    #[error("objective evaluated to a non-finite value at ({x}, {y})")]
    ObjectiveNotFinite2d { x: f64, y: f64 },

    #[error("invalid mixture specification: {reason}")]
    InvalidMixture { reason: String },

    #[error("{which} sample count must be even, got {count}")]
    OddSampleCount { which: &'static str, count: usize },

    #[error("dataset needs at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("invalid class label {label}: labels must be 0 or 1")]
    InvalidLabel { label: u8 },

    #[error("class {class} has no samples")]
    ClassAbsent { class: u8 },

    #[error("class {class} has zero effective weight")]
    ZeroEffectiveWeight { class: u8 },

    #[error("alpha must lie in [0, 1], got {alpha}")]
    AlphaOutOfRange { alpha: f64 },

    #[error("pooled covariance is singular; refit with a positive ridge")]
    SingularCovariance,

    #[error("point has dimension {got}, hypothesis expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("samples have inconsistent dimensions: {first} vs {other}")]
    InconsistentDimensions { first: usize, other: usize },

    #[error("ridge must be nonnegative, got {ridge}")]
    NegativeRidge { ridge: f64 },

    #[error("n + m must be positive")]
    ZeroTotalCount,

    #[error("effective sample weight alpha*n + (1-alpha)*m is zero for alpha={alpha}")]
    ZeroEffectiveDenominator { alpha: f64 },

    #[error("shift must be nonnegative, got {delta}; take the absolute value upstream")]
    NegativeShift { delta: f64 },

    #[error("confidence parameter must lie in (0, 1), got {delta}")]
    InvalidConfidence { delta: f64 },

    #[error("VC dimension must be at least 1")]
    ZeroVcDimension,

    #[error("capacity term must be positive, got {value}")]
    NonPositiveCapacity { value: f64 },

    #[error("divergence term must be positive, got {value}")]
    NonPositiveDivergence { value: f64 },

    #[error("replicate count must be at least {min}, got {got}")]
    TooFewReplicates { got: usize, min: usize },

    #[error("test set size must be even and at least 2, got {got}")]
    InvalidTestSetSize { got: usize },

    #[error("m grid must be nonempty")]
    EmptyGrid,

    #[error("m grid must be strictly ascending at index {index}")]
    GridNotAscending { index: usize },

    #[error("curve needs at least {min} points, got {got}")]
    TooFewCurvePoints { got: usize, min: usize },

    #[error("tolerance must be nonnegative, got {tol}")]
    NegativeTolerance { tol: f64 },

    #[error("previous alpha must lie in [0, 1), got {alpha}")]
    PrevAlphaOutOfRange { alpha: f64 },

    #[error("batch composition infeasible: {pool} pool holds {have} samples but each batch draws {need}")]
    BatchInfeasible {
        pool: &'static str,
        need: usize,
        have: usize,
    },

    #[error("{side} side of the batch is empty but carries nonzero weight")]
    EmptyWeightedSide { side: &'static str },

    #[error("invalid SGD configuration: {reason}")]
    InvalidSgdConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
