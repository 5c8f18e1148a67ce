//! Error-curve sweeps over the OOD sample count, curve-shape classification,
//! and the numeric search for the optimal mixing weight.

use crate::analytic;
use crate::error::{Error, Result};
use crate::math::{grid_argmin_1d, Interval};
use crate::mixture::MixtureSpec;
use crate::montecarlo::{mc_expected_error_agnostic, mc_expected_error_weighted, McConfig};

/// Default coarse grid size for alpha searches. 100 subintervals put 0, 1/2
/// and 1 exactly on the lattice.
pub const ALPHA_COARSE_POINTS: usize = 100;

/// Default refinement rounds for alpha searches; final resolution 1e-6.
pub const ALPHA_REFINEMENTS: usize = 2;

/// How each sweep point is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepMode {
    AnalyticAgnostic,
    AnalyticWeightedFixed(f64),
    AnalyticWeightedOptimal,
    McAgnostic(McConfig),
    McWeighted(AlphaPolicy, McConfig),
}

impl SweepMode {
    fn tag(&self) -> &'static str {
        match self {
            SweepMode::AnalyticAgnostic => "analytic-agnostic",
            SweepMode::AnalyticWeightedFixed(_) => "analytic-weighted-fixed",
            SweepMode::AnalyticWeightedOptimal => "analytic-weighted-opt",
            SweepMode::McAgnostic(_) => "mc-agnostic",
            SweepMode::McWeighted(..) => "mc-weighted",
        }
    }

    fn alpha_policy_tag(&self) -> Option<String> {
        match self {
            SweepMode::AnalyticAgnostic | SweepMode::McAgnostic(_) => None,
            SweepMode::AnalyticWeightedFixed(a) => Some(format!("fixed({a})")),
            SweepMode::AnalyticWeightedOptimal => Some("numeric-optimal".to_owned()),
            SweepMode::McWeighted(AlphaPolicy::Fixed(a), _) => Some(format!("fixed({a})")),
            SweepMode::McWeighted(AlphaPolicy::NumericOptimal, _) => {
                Some("numeric-optimal".to_owned())
            }
        }
    }
}

/// Weight selection for Monte-Carlo weighted sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPolicy {
    Fixed(f64),
    /// Per-point optimum of the analytic weighted error.
    NumericOptimal,
}

/// Provenance of a sweep, carried alongside the curve values.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub spec: MixtureSpec,
    pub n: usize,
    pub mode: String,
    pub alpha_policy: Option<String>,
}

/// Error (or MSE) values indexed by an ascending grid of OOD sample counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub m_grid: Vec<usize>,
    pub values: Vec<f64>,
    pub std_errs: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
    pub meta: CurveMeta,
}

/// Classified shape of an error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveShape {
    MonotoneDecreasing,
    MonotoneNondecreasing,
    NonMonotonicDip { dip_index: usize, dip_m: usize },
    Flat,
    Other,
}

fn validate_grid(m_grid: &[usize]) -> Result<()> {
    if m_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for i in 1..m_grid.len() {
        if m_grid[i] <= m_grid[i - 1] {
            return Err(Error::GridNotAscending { index: i });
        }
    }
    Ok(())
}

/// Evaluates one error value per entry of `m_grid` under the chosen mode.
/// Monte-Carlo modes reuse the same replicate seeds at every grid point, so
/// curves are smoothed by common random numbers and remain bit-reproducible.
pub fn sweep_m(
    n: usize,
    m_grid: &[usize],
    spec: &MixtureSpec,
    mode: &SweepMode,
) -> Result<ErrorCurve> {
    validate_grid(m_grid)?;
    let meta = CurveMeta {
        spec: *spec,
        n,
        mode: mode.tag().to_owned(),
        alpha_policy: mode.alpha_policy_tag(),
    };

    let mut values = Vec::with_capacity(m_grid.len());
    let mut std_errs: Option<Vec<f64>> = None;
    let mut alphas: Option<Vec<f64>> = None;

    match mode {
        SweepMode::AnalyticAgnostic => {
            for &m in m_grid {
                values.push(analytic::expected_error_agnostic(n, m, spec)?);
            }
        }
        SweepMode::AnalyticWeightedFixed(alpha) => {
            let mut a = Vec::with_capacity(m_grid.len());
            for &m in m_grid {
                values.push(analytic::expected_error_weighted(n, m, *alpha, spec)?);
                a.push(*alpha);
            }
            alphas = Some(a);
        }
        SweepMode::AnalyticWeightedOptimal => {
            let mut a = Vec::with_capacity(m_grid.len());
            for &m in m_grid {
                let (alpha, error) =
                    optimal_alpha_numeric(n, m, spec, ALPHA_COARSE_POINTS, ALPHA_REFINEMENTS)?;
                values.push(error);
                a.push(alpha);
            }
            alphas = Some(a);
        }
        SweepMode::McAgnostic(cfg) => {
            let mut ses = Vec::with_capacity(m_grid.len());
            for &m in m_grid {
                let est = mc_expected_error_agnostic(n, m, spec, cfg)?;
                values.push(est.mean);
                ses.push(est.std_err);
            }
            std_errs = Some(ses);
        }
        SweepMode::McWeighted(policy, cfg) => {
            let mut ses = Vec::with_capacity(m_grid.len());
            let mut a = Vec::with_capacity(m_grid.len());
            for &m in m_grid {
                let alpha = match policy {
                    AlphaPolicy::Fixed(alpha) => *alpha,
                    AlphaPolicy::NumericOptimal => {
                        optimal_alpha_numeric(n, m, spec, ALPHA_COARSE_POINTS, ALPHA_REFINEMENTS)?.0
                    }
                };
                let est = mc_expected_error_weighted(n, m, alpha, spec, cfg)?;
                values.push(est.mean);
                ses.push(est.std_err);
                a.push(alpha);
            }
            std_errs = Some(ses);
            alphas = Some(a);
        }
    }

    Ok(ErrorCurve {
        m_grid: m_grid.to_vec(),
        values,
        std_errs,
        alphas,
        meta,
    })
}

/// Classifies a curve within an absolute tolerance.
///
/// The dip pattern has priority: the curve is a `NonMonotonicDip` iff some
/// point falls more than `tol` below the first value and a later point rises
/// more than `tol` above it. `dip_index` is the global argmin, ties broken
/// toward the smaller m.
pub fn detect_shape(curve: &ErrorCurve, tol: f64) -> Result<CurveShape> {
    let v = &curve.values;
    if v.len() < 3 {
        return Err(Error::TooFewCurvePoints {
            got: v.len(),
            min: 3,
        });
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::NegativeTolerance { tol });
    }

    // suffix_max[i] = max of v[i..]
    let mut suffix_max = vec![f64::NEG_INFINITY; v.len() + 1];
    for i in (0..v.len()).rev() {
        suffix_max[i] = v[i].max(suffix_max[i + 1]);
    }
    let dip = (0..v.len()).any(|i| v[i] < v[0] - tol && suffix_max[i + 1] > v[i] + tol);
    if dip {
        let mut dip_index = 0;
        for (i, val) in v.iter().enumerate() {
            if *val < v[dip_index] {
                dip_index = i;
            }
        }
        return Ok(CurveShape::NonMonotonicDip {
            dip_index,
            dip_m: curve.m_grid[dip_index],
        });
    }

    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if max - min <= tol {
        return Ok(CurveShape::Flat);
    }

    let never_rises = v.windows(2).all(|w| w[1] - w[0] <= tol);
    if never_rises && v[0] - v[v.len() - 1] > tol {
        return Ok(CurveShape::MonotoneDecreasing);
    }
    let never_falls = v.windows(2).all(|w| w[1] - w[0] >= -tol);
    if never_falls && v[v.len() - 1] - v[0] > tol {
        return Ok(CurveShape::MonotoneNondecreasing);
    }
    Ok(CurveShape::Other)
}

/// Minimizes the analytic weighted error over `alpha in [0, 1]` for the given
/// sample counts. Returns `(alpha_star, error)`.
///
/// At `m = 0` the objective is constant in alpha and the convention is
/// `alpha_star = 1` (train on target only).
pub fn optimal_alpha_numeric(
    n: usize,
    m: usize,
    spec: &MixtureSpec,
    coarse_points: usize,
    refinements: usize,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::ZeroTotalCount);
    }
    if m == 0 {
        return Ok((1.0, analytic::expected_error_agnostic(n, 0, spec)?));
    }
    let domain = Interval::new(0.0, 1.0)?;
    grid_argmin_1d(
        |alpha| analytic::weighted_error_unchecked(n, m, alpha, spec),
        domain,
        coarse_points,
        refinements,
    )
}

/// Equally spaced 10-point alpha search set from `prev_alpha` toward 1.0
/// (excluding 1.0): `prev + k (1 - prev) / 10` for `k = 0..9`.
pub fn adaptive_alpha_schedule(prev_alpha: f64) -> Result<[f64; 10]> {
    if !(0.0..1.0).contains(&prev_alpha) {
        return Err(Error::PrevAlphaOutOfRange { alpha: prev_alpha });
    }
    let step = (1.0 - prev_alpha) / 10.0;
    let mut schedule = [0.0; 10];
    for (k, slot) in schedule.iter_mut().enumerate() {
        *slot = prev_alpha + k as f64 * step;
    }
    Ok(schedule)
}

/// Alpha search strategy for [`alpha_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSearch {
    /// Full grid search at every m.
    FineGrid,
    /// The adaptive 10-point schedule, threading the previous optimum through
    /// the ascending m grid.
    Adaptive { initial_prev: f64 },
}

/// One point of an alpha-star trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPoint {
    pub m: usize,
    pub alpha: f64,
    pub error: f64,
}

/// Optimal alpha per grid point, using the chosen search strategy.
pub fn alpha_trajectory(
    n: usize,
    m_grid: &[usize],
    spec: &MixtureSpec,
    search: &AlphaSearch,
) -> Result<Vec<AlphaPoint>> {
    validate_grid(m_grid)?;
    match search {
        AlphaSearch::FineGrid => m_grid
            .iter()
            .map(|&m| {
                let (alpha, error) =
                    optimal_alpha_numeric(n, m, spec, ALPHA_COARSE_POINTS, ALPHA_REFINEMENTS)?;
                Ok(AlphaPoint { m, alpha, error })
            })
            .collect(),
        AlphaSearch::Adaptive { initial_prev } => {
            let mut prev = *initial_prev;
            if !(0.0..1.0).contains(&prev) {
                return Err(Error::PrevAlphaOutOfRange { alpha: prev });
            }
            let mut out = Vec::with_capacity(m_grid.len());
            for &m in m_grid {
                if m == 0 {
                    // Objective is constant in alpha; keep the incumbent.
                    out.push(AlphaPoint {
                        m,
                        alpha: prev,
                        error: analytic::expected_error_agnostic(n, 0, spec)?,
                    });
                    continue;
                }
                let schedule = adaptive_alpha_schedule(prev)?;
                let mut best = (schedule[0], f64::INFINITY);
                for alpha in schedule {
                    let error = analytic::expected_error_weighted(n, m, alpha, spec)?;
                    if error < best.1 {
                        best = (alpha, error);
                    }
                }
                prev = best.0;
                out.push(AlphaPoint {
                    m,
                    alpha: best.0,
                    error: best.1,
                });
            }
            Ok(out)
        }
    }
}
