//! `oodlab` - curves, bounds, alpha searches, Monte-Carlo validation, and a
//! small SGD demo for the OOD-sample generalization study.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 numerical or runtime
//! failure. Every command accepts `--seed` and `--config <sidecar.json>`;
//! flags override config values. Set OODLAB_THREADS to cap internal
//! parallelism (results are identical for any thread count).

use clap::Parser;

mod commands;
mod grid;
mod output;
mod svg;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(String),
}

pub mod args {
    use clap::{Args, Parser, Subcommand};

    #[derive(Debug, Parser)]
    #[command(
        name = "oodlab",
        version,
        about = "OOD-sample generalization error lab"
    )]
    pub struct Cli {
        #[command(subcommand)]
        pub command: Command,
    }

    #[derive(Debug, Subcommand)]
    pub enum Command {
        /// Target-error curve over an OOD-count grid (analytic or Monte-Carlo).
        Curve(CurveArgs),
        /// Generalization upper bound vs the true analytic error.
        Bound(BoundArgs),
        /// Threshold MSE and its bias/variance split.
        Mse(MseArgs),
        /// Optimal mixing weight trajectory over the OOD grid.
        Alpha(AlphaArgs),
        /// Monte-Carlo validation runs.
        Mc(McArgs),
        /// Logistic-SGD demo sweep.
        Train(TrainArgs),
        /// Render an existing CSV as an SVG line chart.
        Plot(PlotArgs),
    }

    #[derive(Debug, Args)]
    pub struct CommonArgs {
        /// Target sample count n.
        #[arg(long)]
        pub n: Option<usize>,
        /// Class-mean half-separation mu.
        #[arg(long)]
        pub mu: Option<f64>,
        /// Class-conditional standard deviation sigma.
        #[arg(long)]
        pub sigma: Option<f64>,
        /// OOD translation delta.
        #[arg(long)]
        pub delta: Option<f64>,
        /// OOD grid as start:stop:step (inclusive) or a comma list.
        #[arg(long)]
        pub m_grid: Option<String>,
        /// Explicit OOD count (repeatable); alternative to --m-grid.
        #[arg(long = "m")]
        pub m: Vec<usize>,
        /// Master seed.
        #[arg(long)]
        pub seed: Option<u64>,
        /// JSON run config / sidecar; flags override its values.
        #[arg(long)]
        pub config: Option<String>,
        /// Output base path (writes <out>.csv, <out>.json, optional <out>.svg).
        #[arg(long)]
        pub out: Option<String>,
        /// Also emit an SVG chart.
        #[arg(long, default_value_t = false)]
        pub svg: bool,
    }

    #[derive(Debug, Args)]
    pub struct CurveArgs {
        #[command(flatten)]
        pub common: CommonArgs,
        /// analytic-agnostic | analytic-weighted-fixed | analytic-weighted-opt
        /// | mc-agnostic | mc-weighted
        #[arg(long)]
        pub mode: Option<String>,
        /// Fixed mixing weight for weighted modes.
        #[arg(long)]
        pub alpha: Option<f64>,
        /// fixed | optimal (weighted Monte-Carlo modes).
        #[arg(long)]
        pub alpha_policy: Option<String>,
        /// Monte-Carlo replicates.
        #[arg(long)]
        pub replicates: Option<usize>,
        /// exact | test-set
        #[arg(long)]
        pub estimator: Option<String>,
        /// Test-set size for the test-set estimator.
        #[arg(long)]
        pub test_n: Option<usize>,
    }

    #[derive(Debug, Args)]
    pub struct BoundArgs {
        #[command(flatten)]
        pub common: CommonArgs,
        /// Confidence parameter of the bound.
        #[arg(long)]
        pub delta_conf: Option<f64>,
        /// Lattice points per axis for the divergence supremum.
        #[arg(long)]
        pub sup_points: Option<usize>,
        /// VC dimension of the hypothesis class.
        #[arg(long)]
        pub vc_dim: Option<usize>,
    }

    #[derive(Debug, Args)]
    pub struct MseArgs {
        #[command(flatten)]
        pub common: CommonArgs,
        /// analytic | mc
        #[arg(long)]
        pub mode: Option<String>,
        /// Monte-Carlo replicates (mc mode).
        #[arg(long)]
        pub replicates: Option<usize>,
    }

    #[derive(Debug, Args)]
    pub struct AlphaArgs {
        #[command(flatten)]
        pub common: CommonArgs,
        /// fine | adaptive
        #[arg(long)]
        pub search: Option<String>,
        /// Starting alpha for the adaptive schedule.
        #[arg(long)]
        pub initial_prev: Option<f64>,
    }

    #[derive(Debug, Args)]
    pub struct McArgs {
        #[command(flatten)]
        pub common: CommonArgs,
        /// agnostic | weighted
        #[arg(long)]
        pub mode: Option<String>,
        /// Fixed mixing weight (weighted mode).
        #[arg(long)]
        pub alpha: Option<f64>,
        /// fixed | optimal (weighted mode).
        #[arg(long)]
        pub alpha_policy: Option<String>,
        /// Monte-Carlo replicates.
        #[arg(long)]
        pub replicates: Option<usize>,
        /// exact | test-set
        #[arg(long)]
        pub estimator: Option<String>,
        /// Test-set size for the test-set estimator.
        #[arg(long)]
        pub test_n: Option<usize>,
    }

    #[derive(Debug, Args)]
    pub struct TrainArgs {
        #[command(flatten)]
        pub common: CommonArgs,
        /// agnostic | weighted
        #[arg(long)]
        pub mode: Option<String>,
        /// Fixed mixing weight (weighted mode).
        #[arg(long)]
        pub alpha: Option<f64>,
        /// fixed | optimal (weighted mode).
        #[arg(long)]
        pub alpha_policy: Option<String>,
        /// Per-batch target fraction beta.
        #[arg(long)]
        pub beta: Option<f64>,
        /// SGD learning rate.
        #[arg(long = "lr")]
        pub learning_rate: Option<f64>,
        /// Training epochs.
        #[arg(long)]
        pub epochs: Option<usize>,
        /// Mini-batch size.
        #[arg(long)]
        pub batch_size: Option<usize>,
        /// Independent seeded runs to average.
        #[arg(long)]
        pub runs: Option<usize>,
    }

    #[derive(Debug, Args)]
    pub struct PlotArgs {
        /// Input CSV (first column is the x axis).
        #[arg(long)]
        pub input: Option<String>,
        /// Chart title.
        #[arg(long)]
        pub title: Option<String>,
        /// Master seed (recorded; plotting is deterministic).
        #[arg(long)]
        pub seed: Option<u64>,
        /// JSON run config / sidecar; flags override its values.
        #[arg(long)]
        pub config: Option<String>,
        /// Output base path (writes <out>.svg and <out>.json).
        #[arg(long)]
        pub out: Option<String>,
    }
}

fn configure_threads() -> Result<(), CliError> {
    match std::env::var("OODLAB_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let threads: usize = raw.parse().map_err(|_| {
                CliError::Usage(format!(
                    "OODLAB_THREADS must be a positive integer, got `{raw}`"
                ))
            })?;
            if threads == 0 {
                return Err(CliError::Usage(
                    "OODLAB_THREADS must be a positive integer".to_owned(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Run(format!("configuring thread pool: {e}")))
        }
    }
}

fn main() {
    let cli = args::Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        args::Command::Curve(a) => commands::run_curve(a),
        args::Command::Bound(a) => commands::run_bound(a),
        args::Command::Mse(a) => commands::run_mse(a),
        args::Command::Alpha(a) => commands::run_alpha(a),
        args::Command::Mc(a) => commands::run_mc(a),
        args::Command::Train(a) => commands::run_train(a),
        args::Command::Plot(a) => commands::run_plot(a),
    });
    match result {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}
