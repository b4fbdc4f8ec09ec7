//! `sparse-ewa`: generate synthetic data, fit estimators, run the benchmark
//! tables, check noise couplings and evaluate risk bounds.
//!
//! Exit codes: 0 on success, 2 on usage errors or unreadable input, 3 when
//! the EWA chain diverged (the estimate file is still written).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sparse-ewa", version, about = "Sparse exponentially weighted aggregation via Langevin Monte-Carlo")]
pub struct Cli {
    /// Seed for every random draw of the command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset (CSV plus JSON sidecar with sigma and truth).
    Gen {
        #[command(subcommand)]
        experiment: GenExperiment,
    },
    /// Fit an estimator to a dataset CSV.
    Fit {
        #[command(subcommand)]
        estimator: FitEstimator,
    },
    /// Replicate one of the benchmark experiments and write the loss table.
    Bench {
        #[command(subcommand)]
        experiment: BenchExperiment,
    },
    /// Noise-model utilities.
    Noise {
        #[command(subcommand)]
        action: NoiseAction,
    },
    /// Risk-bound calculators.
    Bound {
        #[command(subcommand)]
        bound: BoundKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenExperiment {
    /// Rademacher design, lambda*_j = 1 for j <= S, sigma^2 = S / 9.
    Example1 {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 5)]
        s: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rectangle image on [0,1]^2 with a k x k indicator dictionary.
    Example2 {
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset CSV (`y,x1,...,xM`); a sidecar `<stem>.json` is read if present.
    #[arg(long)]
    pub data: PathBuf,
    /// Noise level; overrides the sidecar value.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Estimate JSON destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FitEstimator {
    /// EWA with the sparsity prior, averaged along the Langevin chain.
    Ewa {
        #[command(flatten)]
        data: DataArgs,
        /// Temperature; default 4 sigma^2.
        #[arg(long)]
        beta: Option<f64>,
        /// Prior scale; default 4 sigma / sqrt(Tr(X^T X)).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// l1 radius of the prior support; unbounded when absent.
        #[arg(long)]
        radius: Option<f64>,
        /// Euler step; default beta / Tr(X^T X).
        #[arg(long)]
        step: Option<f64>,
        /// Time horizon T; default n.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        burn_in: f64,
        #[arg(long, default_value_t = sparse_ewa::sampler::DEFAULT_MAX_RESTARTS)]
        max_restarts: u32,
        /// Write the thinned chain to this CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Keep every k-th iterate in the trace.
        #[arg(long, default_value_t = 100)]
        trace_every: usize,
    },
    /// Coordinate-descent Lasso.
    Lasso {
        #[command(flatten)]
        data: DataArgs,
        /// Regularization level r; default sigma sqrt(2 log M / n).
        #[arg(long)]
        reg_level: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Oracle Lasso-Gauss (needs the truth in the sidecar).
    LassoGauss {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = sparse_ewa::estimators::DEFAULT_GRID_SIZE)]
        grid_size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Ewa,
    Lasso,
    LassoGauss,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ewa,lasso,lasso-gauss")]
    pub estimators: Vec<EstimatorArg>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Override the EWA horizon T (default n).
    #[arg(long)]
    pub ewa_horizon: Option<f64>,
    /// Fill the `seconds` column with wall times (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Table CSV destination; standard output when absent. The resolved
    /// specification is written next to it as `<stem>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BenchExperiment {
    Example1 {
        #[arg(long, value_delimiter = ',', default_values_t = [100])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [100])]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [5])]
        s: Vec<usize>,
        #[command(flatten)]
        common: BenchArgs,
    },
    Example2 {
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [100])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        sigma: Vec<f64>,
        #[command(flatten)]
        common: BenchArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Rademacher,
    Laplace,
    Uniform,
    BoundedSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Uniform,
    Rademacher,
    Triangular,
}

#[derive(Debug, Subcommand)]
pub enum NoiseAction {
    /// Statistical check of the coupling (xi, zeta) behind the risk bound.
    Check {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 100_000)]
        draws: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Bound B of the bounded-symmetric family.
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        #[arg(long, value_enum, default_value_t = BaseArg::Uniform)]
        base: BaseArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundKind {
    /// Sparsity oracle inequality, term by term.
    Soi {
        /// JSON with `lambda_star`, `beta`, `tau`, `n` and optionally `alpha`,
        /// `radius`, `bias_term`, `link_constant`.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::Diverged) => {
            eprintln!("error: the Langevin chain diverged after all restarts");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
