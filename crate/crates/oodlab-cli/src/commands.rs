//! Command implementations: parameter resolution (flags override config,
//! defaults fill the rest), execution, and output emission.

use serde::{Deserialize, Serialize};

use oodlab::analytic;
use oodlab::bound::{dh_star, lambda_joint, upper_bound_u_with_dh, BoundInputs};
use oodlab::experiments::{
    alpha_trajectory, sweep_m, AlphaPolicy, AlphaSearch, ErrorCurve, SweepMode,
};
use oodlab::mixture::MixtureSpec;
use oodlab::montecarlo::{Estimator, McConfig};
use oodlab::rng::Seed;
use oodlab::training::{train_error_sweep, AlphaSelection, SgdConfig, WeightMode};

use crate::grid::parse_m_grid;
use crate::output::{bound_csv, curve_csv, write_outputs, CurveRow, RunRecord};
use crate::svg::{line_chart, Series};
use crate::{args, CliError};

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn run_err(err: oodlab::Error) -> CliError {
    CliError::Run(err.to_string())
}

fn check_unit_interval(name: &str, v: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(usage(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn pick<T: Clone>(flag: &Option<T>, cfg: Option<&T>, default: T) -> T {
    flag.clone().or_else(|| cfg.cloned()).unwrap_or(default)
}

fn pick_opt<T: Clone>(flag: &Option<T>, cfg: Option<&Option<T>>) -> Option<T> {
    flag.clone().or_else(|| cfg.and_then(|v| v.clone()))
}

fn required_out(flag: &Option<String>, cfg: Option<&String>) -> Result<String, CliError> {
    flag.clone()
        .or_else(|| cfg.cloned())
        .ok_or_else(|| usage("--out is required (or supply it via --config)"))
}

/// Loads and validates a `--config` sidecar for the given command.
fn load_config<P: for<'de> Deserialize<'de>>(
    path: &Option<String>,
    command: &str,
) -> Result<Option<P>, CliError> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawRunFile {
        command: String,
        params: serde_json::Value,
        #[serde(default)]
        #[allow(dead_code)]
        derived: Option<serde_json::Value>,
    }
    let raw: RawRunFile =
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {path}: {e}")))?;
    if raw.command != command {
        return Err(usage(format!(
            "config {path} is for command `{}`, not `{command}`",
            raw.command
        )));
    }
    let params: P = serde_json::from_value(raw.params)
        .map_err(|e| usage(format!("invalid params in {path}: {e}")))?;
    Ok(Some(params))
}

fn build_spec(mu: f64, sigma: f64, delta: f64) -> Result<MixtureSpec, CliError> {
    MixtureSpec::new(mu, sigma, delta).map_err(|e| usage(e.to_string()))
}

fn grid_from(text: &str) -> Result<Vec<usize>, CliError> {
    parse_m_grid(text).map_err(usage)
}

fn estimator_from(name: &str, test_n: usize) -> Result<Estimator, CliError> {
    match name {
        "exact" => Ok(Estimator::ConditionalExact),
        "test-set" => Ok(Estimator::EmpiricalTestSet { test_n }),
        other => Err(usage(format!(
            "unknown estimator `{other}` (expected exact|test-set)"
        ))),
    }
}

fn m_grid_text(
    m_grid_flag: &Option<String>,
    m_flags: &[usize],
    cfg: Option<&String>,
    default: &str,
) -> Result<String, CliError> {
    if m_grid_flag.is_some() && !m_flags.is_empty() {
        return Err(usage("--m-grid and --m are mutually exclusive"));
    }
    if !m_flags.is_empty() {
        return Ok(crate::grid::explicit_grid_text(m_flags));
    }
    Ok(m_grid_flag
        .clone()
        .or_else(|| cfg.cloned())
        .unwrap_or_else(|| default.to_owned()))
}

fn curve_rows(curve: &ErrorCurve) -> Vec<CurveRow> {
    (0..curve.m_grid.len())
        .map(|i| {
            let std_err = curve.std_errs.as_ref().map(|s| s[i]);
            CurveRow {
                m: curve.m_grid[i],
                value: curve.values[i],
                std_err,
                ci95_lo: std_err.map(|se| curve.values[i] - 1.96 * se),
                ci95_hi: std_err.map(|se| curve.values[i] + 1.96 * se),
                alpha: curve.alphas.as_ref().map(|a| a[i]),
            }
        })
        .collect()
}

fn curve_series(name: &str, curve: &ErrorCurve) -> Series {
    Series {
        name: name.to_owned(),
        points: curve
            .m_grid
            .iter()
            .zip(&curve.values)
            .map(|(&m, &v)| (m as f64, v))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// curve
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub m_grid: String,
    pub mode: String,
    pub alpha: Option<f64>,
    pub alpha_policy: Option<String>,
    pub replicates: usize,
    pub estimator: String,
    pub test_n: usize,
    pub seed: u64,
    pub svg: bool,
    pub out: String,
}

pub fn run_curve(a: &args::CurveArgs) -> CliResult {
    let cfg: Option<CurveParams> = load_config(&a.common.config, "curve")?;
    let c = cfg.as_ref();
    let params = CurveParams {
        n: pick(&a.common.n, c.map(|c| &c.n), 100),
        mu: pick(&a.common.mu, c.map(|c| &c.mu), 5.0),
        sigma: pick(&a.common.sigma, c.map(|c| &c.sigma), 10.0),
        delta: pick(&a.common.delta, c.map(|c| &c.delta), 1.6),
        m_grid: m_grid_text(
            &a.common.m_grid,
            &a.common.m,
            c.map(|c| &c.m_grid),
            "0:500:1",
        )?,
        mode: pick(&a.mode, c.map(|c| &c.mode), "analytic-agnostic".to_owned()),
        alpha: pick_opt(&a.alpha, c.map(|c| &c.alpha)),
        alpha_policy: pick_opt(&a.alpha_policy, c.map(|c| &c.alpha_policy)),
        replicates: pick(&a.replicates, c.map(|c| &c.replicates), 2000),
        estimator: pick(&a.estimator, c.map(|c| &c.estimator), "exact".to_owned()),
        test_n: pick(&a.test_n, c.map(|c| &c.test_n), 10_000),
        seed: pick(&a.common.seed, c.map(|c| &c.seed), 42),
        svg: a.common.svg || c.map(|c| c.svg).unwrap_or(false),
        out: required_out(&a.common.out, c.map(|c| &c.out))?,
    };

    let spec = build_spec(params.mu, params.sigma, params.delta)?;
    let grid = grid_from(&params.m_grid)?;
    if let Some(alpha) = params.alpha {
        check_unit_interval("--alpha", alpha)?;
    }
    let fixed_alpha = |p: &CurveParams| -> Result<f64, CliError> {
        p.alpha
            .ok_or_else(|| usage(format!("mode {} requires --alpha", p.mode)))
    };
    let mc_config = |p: &CurveParams| -> Result<McConfig, CliError> {
        McConfig::new(
            p.replicates,
            Seed(p.seed),
            estimator_from(&p.estimator, p.test_n)?,
        )
        .map_err(|e| usage(e.to_string()))
    };

    let mut params = params;
    let mode = match params.mode.as_str() {
        "analytic-agnostic" => SweepMode::AnalyticAgnostic,
        "analytic-weighted-fixed" => SweepMode::AnalyticWeightedFixed(fixed_alpha(&params)?),
        "analytic-weighted-opt" => SweepMode::AnalyticWeightedOptimal,
        "mc-agnostic" => SweepMode::McAgnostic(mc_config(&params)?),
        "mc-weighted" => {
            let policy_name = params
                .alpha_policy
                .clone()
                .unwrap_or_else(|| if params.alpha.is_some() { "fixed" } else { "optimal" }.to_owned());
            let policy = match policy_name.as_str() {
                "fixed" => AlphaPolicy::Fixed(fixed_alpha(&params)?),
                "optimal" => AlphaPolicy::NumericOptimal,
                other => {
                    return Err(usage(format!(
                        "unknown alpha policy `{other}` (expected fixed|optimal)"
                    )))
                }
            };
            params.alpha_policy = Some(policy_name);
            SweepMode::McWeighted(policy, mc_config(&params)?)
        }
        other => {
            return Err(usage(format!(
                "unknown curve mode `{other}` (expected analytic-agnostic|analytic-weighted-fixed|analytic-weighted-opt|mc-agnostic|mc-weighted)"
            )))
        }
    };
    if matches!(mode, SweepMode::McAgnostic(_) | SweepMode::McWeighted(..)) {
        if !params.n.is_multiple_of(2) {
            return Err(usage("Monte-Carlo modes need an even --n"));
        }
        if let Some(m) = grid.iter().find(|m| !m.is_multiple_of(2)) {
            return Err(usage(format!(
                "Monte-Carlo modes need even m values, got {m}"
            )));
        }
    }

    let curve = sweep_m(params.n, &grid, &spec, &mode).map_err(run_err)?;
    let rows = curve_rows(&curve);
    let svg = params.svg.then(|| {
        line_chart(
            &format!("target error vs m ({})", params.mode),
            "m (OOD samples)",
            "expected target error",
            &[curve_series(&params.mode.clone(), &curve)],
        )
    });
    let record = RunRecord {
        command: "curve",
        params: &params,
        derived: None,
    };
    write_outputs(&params.out, &record, &curve_csv(&rows), svg.as_deref()).map_err(CliError::Run)
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub m_grid: String,
    pub delta_conf: f64,
    pub sup_points: usize,
    pub vc_dim: usize,
    pub seed: u64,
    pub svg: bool,
    pub out: String,
}

pub fn run_bound(a: &args::BoundArgs) -> CliResult {
    let cfg: Option<BoundParams> = load_config(&a.common.config, "bound")?;
    let c = cfg.as_ref();
    let params = BoundParams {
        n: pick(&a.common.n, c.map(|c| &c.n), 100),
        mu: pick(&a.common.mu, c.map(|c| &c.mu), 5.0),
        sigma: pick(&a.common.sigma, c.map(|c| &c.sigma), 10.0),
        delta: pick(&a.common.delta, c.map(|c| &c.delta), 1.6),
        m_grid: m_grid_text(
            &a.common.m_grid,
            &a.common.m,
            c.map(|c| &c.m_grid),
            "0:2000:10",
        )?,
        delta_conf: pick(&a.delta_conf, c.map(|c| &c.delta_conf), 0.05),
        sup_points: pick(&a.sup_points, c.map(|c| &c.sup_points), 257),
        vc_dim: pick(&a.vc_dim, c.map(|c| &c.vc_dim), 2),
        seed: pick(&a.common.seed, c.map(|c| &c.seed), 42),
        svg: a.common.svg || c.map(|c| c.svg).unwrap_or(false),
        out: required_out(&a.common.out, c.map(|c| &c.out))?,
    };

    if !(params.delta_conf > 0.0 && params.delta_conf < 1.0) {
        return Err(usage(format!(
            "--delta-conf must lie in (0, 1), got {}",
            params.delta_conf
        )));
    }
    if params.sup_points < 2 {
        return Err(usage("--sup-points must be at least 2"));
    }
    if params.vc_dim == 0 {
        return Err(usage("--vc-dim must be at least 1"));
    }
    let spec = build_spec(params.mu, params.sigma, params.delta)?;
    let grid = grid_from(&params.m_grid)?;
    let dh = dh_star(
        params.delta.abs(),
        params.mu,
        params.sigma,
        params.sup_points,
    )
    .map_err(run_err)?;
    let lambda = lambda_joint(&spec);

    let mut rows = Vec::with_capacity(grid.len());
    let mut true_series = Vec::with_capacity(grid.len());
    let mut bound_series = Vec::with_capacity(grid.len());
    for &m in &grid {
        let inputs = BoundInputs::new(params.n, m, params.delta_conf, params.vc_dim, spec)
            .map_err(run_err)?;
        let u = upper_bound_u_with_dh(&inputs, dh);
        let e = analytic::expected_error_agnostic(params.n, m, &spec).map_err(run_err)?;
        rows.push((m, e, u));
        true_series.push((m as f64, e));
        bound_series.push((m as f64, u));
    }

    let svg = params.svg.then(|| {
        line_chart(
            "upper bound vs true expected target error",
            "m (OOD samples)",
            "error / bound",
            &[
                Series {
                    name: "true_error".to_owned(),
                    points: true_series,
                },
                Series {
                    name: "upper_bound".to_owned(),
                    points: bound_series,
                },
            ],
        )
    });
    let record = RunRecord {
        command: "bound",
        params: &params,
        derived: Some(serde_json::json!({ "dh_star": dh, "lambda": lambda })),
    };
    write_outputs(&params.out, &record, &bound_csv(&rows), svg.as_deref()).map_err(CliError::Run)
}

// ---------------------------------------------------------------------------
// mse
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MseParams {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub m_grid: String,
    pub mode: String,
    pub replicates: usize,
    pub seed: u64,
    pub svg: bool,
    pub out: String,
}

pub fn run_mse(a: &args::MseArgs) -> CliResult {
    let cfg: Option<MseParams> = load_config(&a.common.config, "mse")?;
    let c = cfg.as_ref();
    let params = MseParams {
        n: pick(&a.common.n, c.map(|c| &c.n), 100),
        mu: pick(&a.common.mu, c.map(|c| &c.mu), 5.0),
        sigma: pick(&a.common.sigma, c.map(|c| &c.sigma), 10.0),
        delta: pick(&a.common.delta, c.map(|c| &c.delta), 1.8),
        m_grid: m_grid_text(
            &a.common.m_grid,
            &a.common.m,
            c.map(|c| &c.m_grid),
            "0:2000:10",
        )?,
        mode: pick(&a.mode, c.map(|c| &c.mode), "analytic".to_owned()),
        replicates: pick(&a.replicates, c.map(|c| &c.replicates), 2000),
        seed: pick(&a.common.seed, c.map(|c| &c.seed), 42),
        svg: a.common.svg || c.map(|c| c.svg).unwrap_or(false),
        out: required_out(&a.common.out, c.map(|c| &c.out))?,
    };

    let spec = build_spec(params.mu, params.sigma, params.delta)?;
    let grid = grid_from(&params.m_grid)?;

    let (rows, series) = match params.mode.as_str() {
        "analytic" => {
            let mut rows = Vec::with_capacity(grid.len());
            let mut mse = Vec::new();
            let mut bias2 = Vec::new();
            let mut variance = Vec::new();
            for &m in &grid {
                let d = analytic::mse_decomposition(params.n, m, &spec).map_err(run_err)?;
                rows.push(CurveRow {
                    m,
                    value: d.mse,
                    std_err: None,
                    ci95_lo: None,
                    ci95_hi: None,
                    alpha: None,
                });
                mse.push((m as f64, d.mse));
                bias2.push((m as f64, d.bias * d.bias));
                variance.push((m as f64, d.variance));
            }
            let series = vec![
                Series {
                    name: "mse".to_owned(),
                    points: mse,
                },
                Series {
                    name: "bias^2".to_owned(),
                    points: bias2,
                },
                Series {
                    name: "variance".to_owned(),
                    points: variance,
                },
            ];
            (rows, series)
        }
        "mc" => {
            if !params.n.is_multiple_of(2) {
                return Err(usage("Monte-Carlo mode needs an even --n"));
            }
            if let Some(m) = grid.iter().find(|m| !m.is_multiple_of(2)) {
                return Err(usage(format!(
                    "Monte-Carlo mode needs even m values, got {m}"
                )));
            }
            let mc = McConfig::new(
                params.replicates,
                Seed(params.seed),
                Estimator::ConditionalExact,
            )
            .map_err(|e| usage(e.to_string()))?;
            let mut rows = Vec::with_capacity(grid.len());
            let mut mse = Vec::new();
            for &m in &grid {
                let est = oodlab::montecarlo::mc_threshold_mse(params.n, m, &spec, &mc)
                    .map_err(run_err)?;
                rows.push(CurveRow {
                    m,
                    value: est.mean,
                    std_err: Some(est.std_err),
                    ci95_lo: Some(est.ci95_lo),
                    ci95_hi: Some(est.ci95_hi),
                    alpha: None,
                });
                mse.push((m as f64, est.mean));
            }
            (
                rows,
                vec![Series {
                    name: "mse (mc)".to_owned(),
                    points: mse,
                }],
            )
        }
        other => {
            return Err(usage(format!(
                "unknown mse mode `{other}` (expected analytic|mc)"
            )))
        }
    };

    let svg = params
        .svg
        .then(|| line_chart("threshold MSE vs m", "m (OOD samples)", "mse", &series));
    let record = RunRecord {
        command: "mse",
        params: &params,
        derived: None,
    };
    write_outputs(&params.out, &record, &curve_csv(&rows), svg.as_deref()).map_err(CliError::Run)
}

// ---------------------------------------------------------------------------
// alpha
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaParams {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub m_grid: String,
    pub search: String,
    pub initial_prev: f64,
    pub seed: u64,
    pub svg: bool,
    pub out: String,
}

pub fn run_alpha(a: &args::AlphaArgs) -> CliResult {
    let cfg: Option<AlphaParams> = load_config(&a.common.config, "alpha")?;
    let c = cfg.as_ref();
    let params = AlphaParams {
        n: pick(&a.common.n, c.map(|c| &c.n), 100),
        mu: pick(&a.common.mu, c.map(|c| &c.mu), 5.0),
        sigma: pick(&a.common.sigma, c.map(|c| &c.sigma), 10.0),
        delta: pick(&a.common.delta, c.map(|c| &c.delta), 1.6),
        m_grid: m_grid_text(
            &a.common.m_grid,
            &a.common.m,
            c.map(|c| &c.m_grid),
            "0:2000:40",
        )?,
        search: pick(&a.search, c.map(|c| &c.search), "fine".to_owned()),
        initial_prev: pick(&a.initial_prev, c.map(|c| &c.initial_prev), 0.5),
        seed: pick(&a.common.seed, c.map(|c| &c.seed), 42),
        svg: a.common.svg || c.map(|c| c.svg).unwrap_or(false),
        out: required_out(&a.common.out, c.map(|c| &c.out))?,
    };

    let spec = build_spec(params.mu, params.sigma, params.delta)?;
    let grid = grid_from(&params.m_grid)?;
    let search = match params.search.as_str() {
        "fine" => AlphaSearch::FineGrid,
        "adaptive" => {
            if !(0.0..1.0).contains(&params.initial_prev) {
                return Err(usage(format!(
                    "--initial-prev must lie in [0, 1), got {}",
                    params.initial_prev
                )));
            }
            AlphaSearch::Adaptive {
                initial_prev: params.initial_prev,
            }
        }
        other => {
            return Err(usage(format!(
                "unknown search `{other}` (expected fine|adaptive)"
            )))
        }
    };

    let trajectory = alpha_trajectory(params.n, &grid, &spec, &search).map_err(run_err)?;
    let rows: Vec<CurveRow> = trajectory
        .iter()
        .map(|p| CurveRow {
            m: p.m,
            value: p.error,
            std_err: None,
            ci95_lo: None,
            ci95_hi: None,
            alpha: Some(p.alpha),
        })
        .collect();
    let svg = params.svg.then(|| {
        line_chart(
            "optimal alpha vs m",
            "m (OOD samples)",
            "alpha*",
            &[Series {
                name: "alpha*".to_owned(),
                points: trajectory.iter().map(|p| (p.m as f64, p.alpha)).collect(),
            }],
        )
    });
    let record = RunRecord {
        command: "alpha",
        params: &params,
        derived: None,
    };
    write_outputs(&params.out, &record, &curve_csv(&rows), svg.as_deref()).map_err(CliError::Run)
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McParams {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub m_grid: String,
    pub mode: String,
    pub alpha: Option<f64>,
    pub alpha_policy: Option<String>,
    pub replicates: usize,
    pub estimator: String,
    pub test_n: usize,
    pub seed: u64,
    pub svg: bool,
    pub out: String,
}

pub fn run_mc(a: &args::McArgs) -> CliResult {
    let cfg: Option<McParams> = load_config(&a.common.config, "mc")?;
    let c = cfg.as_ref();
    let mut params = McParams {
        n: pick(&a.common.n, c.map(|c| &c.n), 100),
        mu: pick(&a.common.mu, c.map(|c| &c.mu), 5.0),
        sigma: pick(&a.common.sigma, c.map(|c| &c.sigma), 10.0),
        delta: pick(&a.common.delta, c.map(|c| &c.delta), 1.6),
        m_grid: m_grid_text(
            &a.common.m_grid,
            &a.common.m,
            c.map(|c| &c.m_grid),
            "0,56,200,1000",
        )?,
        mode: pick(&a.mode, c.map(|c| &c.mode), "agnostic".to_owned()),
        alpha: pick_opt(&a.alpha, c.map(|c| &c.alpha)),
        alpha_policy: pick_opt(&a.alpha_policy, c.map(|c| &c.alpha_policy)),
        replicates: pick(&a.replicates, c.map(|c| &c.replicates), 2000),
        estimator: pick(&a.estimator, c.map(|c| &c.estimator), "exact".to_owned()),
        test_n: pick(&a.test_n, c.map(|c| &c.test_n), 10_000),
        seed: pick(&a.common.seed, c.map(|c| &c.seed), 42),
        svg: a.common.svg || c.map(|c| c.svg).unwrap_or(false),
        out: required_out(&a.common.out, c.map(|c| &c.out))?,
    };

    let spec = build_spec(params.mu, params.sigma, params.delta)?;
    let grid = grid_from(&params.m_grid)?;
    if let Some(alpha) = params.alpha {
        check_unit_interval("--alpha", alpha)?;
    }
    if !params.n.is_multiple_of(2) {
        return Err(usage("Monte-Carlo estimation needs an even --n"));
    }
    if let Some(m) = grid.iter().find(|m| !m.is_multiple_of(2)) {
        return Err(usage(format!(
            "Monte-Carlo estimation needs even m values, got {m}"
        )));
    }
    let mc = McConfig::new(
        params.replicates,
        Seed(params.seed),
        estimator_from(&params.estimator, params.test_n)?,
    )
    .map_err(|e| usage(e.to_string()))?;

    let mode = match params.mode.as_str() {
        "agnostic" => SweepMode::McAgnostic(mc),
        "weighted" => {
            let policy_name = params.alpha_policy.clone().unwrap_or_else(|| {
                if params.alpha.is_some() {
                    "fixed"
                } else {
                    "optimal"
                }
                .to_owned()
            });
            let policy =
                match policy_name.as_str() {
                    "fixed" => AlphaPolicy::Fixed(params.alpha.ok_or_else(|| {
                        usage("weighted mode with fixed policy requires --alpha")
                    })?),
                    "optimal" => AlphaPolicy::NumericOptimal,
                    other => {
                        return Err(usage(format!(
                            "unknown alpha policy `{other}` (expected fixed|optimal)"
                        )))
                    }
                };
            params.alpha_policy = Some(policy_name);
            SweepMode::McWeighted(policy, mc)
        }
        other => {
            return Err(usage(format!(
                "unknown mc mode `{other}` (expected agnostic|weighted)"
            )))
        }
    };

    let curve = sweep_m(params.n, &grid, &spec, &mode).map_err(run_err)?;
    let rows = curve_rows(&curve);
    let svg = params.svg.then(|| {
        line_chart(
            &format!("Monte-Carlo target error ({})", params.mode),
            "m (OOD samples)",
            "estimated target error",
            &[curve_series("mc", &curve)],
        )
    });
    let record = RunRecord {
        command: "mc",
        params: &params,
        derived: None,
    };
    write_outputs(&params.out, &record, &curve_csv(&rows), svg.as_deref()).map_err(CliError::Run)
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainParams {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub m_grid: String,
    pub mode: String,
    pub alpha: Option<f64>,
    pub alpha_policy: Option<String>,
    pub beta: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub runs: usize,
    pub seed: u64,
    pub svg: bool,
    pub out: String,
}

pub fn run_train(a: &args::TrainArgs) -> CliResult {
    let cfg: Option<TrainParams> = load_config(&a.common.config, "train")?;
    let c = cfg.as_ref();
    let mut params = TrainParams {
        n: pick(&a.common.n, c.map(|c| &c.n), 100),
        mu: pick(&a.common.mu, c.map(|c| &c.mu), 5.0),
        sigma: pick(&a.common.sigma, c.map(|c| &c.sigma), 10.0),
        delta: pick(&a.common.delta, c.map(|c| &c.delta), 1.6),
        m_grid: m_grid_text(
            &a.common.m_grid,
            &a.common.m,
            c.map(|c| &c.m_grid),
            "0,20,50,100,400,2000",
        )?,
        mode: pick(&a.mode, c.map(|c| &c.mode), "agnostic".to_owned()),
        alpha: pick_opt(&a.alpha, c.map(|c| &c.alpha)),
        alpha_policy: pick_opt(&a.alpha_policy, c.map(|c| &c.alpha_policy)),
        beta: pick(&a.beta, c.map(|c| &c.beta), 0.5),
        learning_rate: pick(&a.learning_rate, c.map(|c| &c.learning_rate), 0.01),
        epochs: pick(&a.epochs, c.map(|c| &c.epochs), 50),
        batch_size: pick(&a.batch_size, c.map(|c| &c.batch_size), 20),
        runs: pick(&a.runs, c.map(|c| &c.runs), 10),
        seed: pick(&a.common.seed, c.map(|c| &c.seed), 42),
        svg: a.common.svg || c.map(|c| c.svg).unwrap_or(false),
        out: required_out(&a.common.out, c.map(|c| &c.out))?,
    };

    let spec = build_spec(params.mu, params.sigma, params.delta)?;
    let grid = grid_from(&params.m_grid)?;
    if let Some(alpha) = params.alpha {
        check_unit_interval("--alpha", alpha)?;
    }
    check_unit_interval("--beta", params.beta)?;
    if !(params.learning_rate.is_finite() && params.learning_rate > 0.0) {
        return Err(usage(format!(
            "--lr must be positive, got {}",
            params.learning_rate
        )));
    }
    if params.epochs == 0 || params.batch_size == 0 || params.runs == 0 {
        return Err(usage(
            "--epochs, --batch-size, and --runs must be at least 1",
        ));
    }
    let selection = match params.mode.as_str() {
        "agnostic" => AlphaSelection::Agnostic,
        "weighted" => {
            let policy_name = params.alpha_policy.clone().unwrap_or_else(|| {
                if params.alpha.is_some() {
                    "fixed"
                } else {
                    "optimal"
                }
                .to_owned()
            });
            let selection =
                match policy_name.as_str() {
                    "fixed" => AlphaSelection::Fixed(params.alpha.ok_or_else(|| {
                        usage("weighted mode with fixed policy requires --alpha")
                    })?),
                    "optimal" => AlphaSelection::NumericOptimal,
                    other => {
                        return Err(usage(format!(
                            "unknown alpha policy `{other}` (expected fixed|optimal)"
                        )))
                    }
                };
            params.alpha_policy = Some(policy_name);
            selection
        }
        other => {
            return Err(usage(format!(
                "unknown train mode `{other}` (expected agnostic|weighted)"
            )))
        }
    };

    let base = SgdConfig {
        learning_rate: params.learning_rate,
        epochs: params.epochs,
        batch_size: params.batch_size,
        beta: params.beta,
        mode: WeightMode::Agnostic,
        seed: Seed(params.seed),
    };
    let points = train_error_sweep(
        &spec,
        params.n,
        &grid,
        params.runs,
        &base,
        selection,
        Seed(params.seed),
    )
    .map_err(run_err)?;

    let rows: Vec<CurveRow> = points
        .iter()
        .map(|p| CurveRow {
            m: p.m,
            value: p.mean,
            std_err: Some(p.std_err),
            ci95_lo: Some(p.mean - 1.96 * p.std_err),
            ci95_hi: Some(p.mean + 1.96 * p.std_err),
            alpha: p.alpha,
        })
        .collect();
    let svg = params.svg.then(|| {
        line_chart(
            &format!("logistic SGD target error ({})", params.mode),
            "m (OOD samples)",
            "mean final target error",
            &[Series {
                name: params.mode.clone(),
                points: points.iter().map(|p| (p.m as f64, p.mean)).collect(),
            }],
        )
    });
    let record = RunRecord {
        command: "train",
        params: &params,
        derived: None,
    };
    write_outputs(&params.out, &record, &curve_csv(&rows), svg.as_deref()).map_err(CliError::Run)
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotParams {
    pub input: String,
    pub title: String,
    pub seed: u64,
    pub out: String,
}

pub fn run_plot(a: &args::PlotArgs) -> CliResult {
    let cfg: Option<PlotParams> = load_config(&a.config, "plot")?;
    let c = cfg.as_ref();
    let params = PlotParams {
        input: a
            .input
            .clone()
            .or_else(|| c.map(|c| c.input.clone()))
            .ok_or_else(|| usage("--input is required"))?,
        title: pick(&a.title, c.map(|c| &c.title), "curve".to_owned()),
        seed: pick(&a.seed, c.map(|c| &c.seed), 42),
        out: required_out(&a.out, c.map(|c| &c.out))?,
    };

    let text = std::fs::read_to_string(&params.input)
        .map_err(|e| usage(format!("cannot read {}: {e}", params.input)))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| usage("empty CSV"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 {
        return Err(usage("CSV needs at least two columns"));
    }
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        rows.push(
            line.split(',')
                .map(|cell| cell.trim().parse::<f64>().ok())
                .collect(),
        );
    }
    if rows.is_empty() {
        return Err(usage("CSV has no data rows"));
    }

    let mut series = Vec::new();
    for (col, name) in columns.iter().enumerate().skip(1) {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|row| {
                let x = row.first().copied().flatten()?;
                let y = row.get(col).copied().flatten()?;
                Some((x, y))
            })
            .collect();
        if !points.is_empty() {
            series.push(Series {
                name: (*name).to_owned(),
                points,
            });
        }
    }
    if series.is_empty() {
        return Err(usage("CSV has no numeric series to plot"));
    }

    let svg = line_chart(&params.title, columns[0], "value", &series);
    let record = RunRecord {
        command: "plot",
        params: &params,
        derived: None,
    };
    // plot emits no CSV of its own; the sidecar still records the run.
    let base = std::path::Path::new(&params.out);
    if let Some(parent) = base.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Run(format!("creating {parent:?}: {e}")))?;
        }
    }
    std::fs::write(base.with_extension("svg"), svg)
        .map_err(|e| CliError::Run(format!("writing svg: {e}")))?;
    let sidecar = serde_json::to_string_pretty(&record)
        .map_err(|e| CliError::Run(format!("serializing sidecar: {e}")))?;
    std::fs::write(base.with_extension("json"), format!("{sidecar}\n"))
        .map_err(|e| CliError::Run(format!("writing sidecar: {e}")))?;
    Ok(())
}
