use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sparse_ewa::bench::{run_bench, BenchSpec, EstimatorKind, Experiment};
use sparse_ewa::datagen::{gen_example1, gen_example2, Example1Spec, Example2Spec};
use sparse_ewa::estimators::{
    ewa_fit, lasso_fit, lasso_gauss_ideal, EwaConfig, LassoConfig,
};
use sparse_ewa::io::{read_dataset, write_dataset, write_json, write_trace, EstimateOutput};
use sparse_ewa::model::RegressionDataset;
use sparse_ewa::noise::{beta_threshold, verify_coupling, BoundedBase, NoiseModel};
use sparse_ewa::theory::{kl_sparsity_bound, soi_breakdown, SoiInputs};
use sparse_ewa::Result;

use crate::{
    BaseArg, BenchArgs, BenchExperiment, BoundKind, Cli, Command, DataArgs, EstimatorArg, FamilyArg,
    FitEstimator, GenExperiment, NoiseAction,
};

pub enum Status {
    Ok,
    Diverged,
}

pub fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Gen { experiment } => generate(experiment, cli.seed),
        Command::Fit { estimator } => fit(estimator, cli.seed),
        Command::Bench { experiment } => bench(experiment, cli.seed),
        Command::Noise { action } => noise(action, cli.seed),
        Command::Bound { bound } => evaluate_bound(bound),
    }
}

/// Pretty JSON with a trailing newline, to a file or standard output.
fn emit<T: Serialize + ?Sized>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn generate(experiment: &GenExperiment, seed: u64) -> Result<Status> {
    let (dataset, out, config) = match *experiment {
        GenExperiment::Example1 { n, m, s, ref out } => {
            let spec = Example1Spec { n, m, s, seed };
            (gen_example1(&spec)?, out, json!({ "experiment": "example1", "spec": spec }))
        }
        GenExperiment::Example2 { k, n, sigma, ref out } => {
            let spec = Example2Spec { k, n, sigma, seed };
            (gen_example2(&spec)?, out, json!({ "experiment": "example2", "spec": spec }))
        }
    };
    write_dataset(out, &dataset)?;
    emit(None, &config)?;
    Ok(Status::Ok)
}

fn load(data: &DataArgs) -> Result<RegressionDataset> {
    let dataset = read_dataset(&data.data)?;
    match data.sigma {
        Some(sigma) => dataset.with_noise_level(sigma),
        None => Ok(dataset),
    }
}

fn fit(estimator: &FitEstimator, seed: u64) -> Result<Status> {
    match estimator {
        FitEstimator::Ewa {
            data,
            beta,
            tau,
            alpha,
            radius,
            step,
            horizon,
            burn_in,
            max_restarts,
            trace,
            trace_every,
        } => {
            let dataset = load(data)?;
            let config = EwaConfig {
                beta: *beta,
                tau: *tau,
                alpha: *alpha,
                radius: radius.unwrap_or(f64::INFINITY),
                step: *step,
                horizon: *horizon,
                burn_in: *burn_in,
                seed,
                max_restarts: *max_restarts,
                trace_every: trace.as_ref().map(|_| *trace_every),
                ..EwaConfig::default()
            };
            let fit = ewa_fit(&dataset, &config)?;
            for warning in &fit.config.warnings {
                eprintln!("warning: {warning}");
            }
            if let Some(path) = trace {
                write_trace(path, &fit.report.trace)?;
            }
            let report = &fit.report;
            let diagnostics = json!({
                "estimator": "ewa",
                "config": fit.config,
                "restarts_used": report.restarts_used,
                "final_step": report.final_step,
                "steps_taken": report.steps_taken,
                "diverged": report.diverged,
                "trace_norm_summary": report.trace_norm_summary,
                "support_rejections": report.support_rejections,
                "standard_errors": report.standard_errors(),
            });
            emit(data.out.as_deref(), &EstimateOutput { estimate: fit.estimate.clone(), diagnostics })?;
            Ok(if fit.diverged() { Status::Diverged } else { Status::Ok })
        }
        FitEstimator::Lasso { data, reg_level, max_sweeps, tol } => {
            let dataset = load(data)?;
            let config = LassoConfig {
                reg_level: *reg_level,
                max_sweeps: *max_sweeps,
                tol: *tol,
                track_objective: false,
            };
            let fit = lasso_fit(&dataset, &config)?;
            if !fit.converged {
                eprintln!("warning: coordinate descent stopped after {} sweeps without converging", fit.sweeps);
            }
            let diagnostics = json!({
                "estimator": "lasso",
                "config": LassoConfig { reg_level: Some(fit.reg_level), ..config },
                "sweeps": fit.sweeps,
                "converged": fit.converged,
            });
            emit(data.out.as_deref(), &EstimateOutput { estimate: fit.coefficients, diagnostics })?;
            Ok(Status::Ok)
        }
        FitEstimator::LassoGauss { data, grid_size } => {
            let dataset = load(data)?;
            let fit = lasso_gauss_ideal(&dataset, *grid_size)?;
            let diagnostics = json!({
                "estimator": "lasso_gauss",
                "config": { "grid_size": grid_size },
                "reg_level": fit.reg_level,
                "support": fit.support,
                "loss": fit.loss,
                "path": fit.path,
            });
            emit(data.out.as_deref(), &EstimateOutput { estimate: fit.coefficients, diagnostics })?;
            Ok(Status::Ok)
        }
    }
}

fn bench(experiment: &BenchExperiment, seed: u64) -> Result<Status> {
    let (experiments, common) = match experiment {
        BenchExperiment::Example1 { n, m, s, common } => {
            let mut cells = Vec::new();
            for &n in n {
                for &m in m {
                    for &s in s {
                        cells.push(Experiment::Example1 { n, m, s });
                    }
                }
            }
            (cells, common)
        }
        BenchExperiment::Example2 { k, n, sigma, common } => {
            let mut cells = Vec::new();
            for &n in n {
                for &sigma in sigma {
                    cells.push(Experiment::Example2 { k: *k, n, sigma });
                }
            }
            (cells, common)
        }
    };
    let spec = bench_spec(experiments, common, seed);
    let report = run_bench(&spec)?;
    let csv = report.to_csv(common.timing);
    match &common.out {
        Some(path) => {
            fs::write(path, &csv)?;
            write_json(&path.with_extension("json"), &spec)?;
        }
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    for cell in &report.cells {
        if cell.divergences > 0 {
            eprintln!(
                "warning: {} {} diverged in {} of {} replications",
                cell.experiment.name(),
                cell.estimator.name(),
                cell.divergences,
                spec.replications
            );
        }
        if !cell.sd_defined {
            eprintln!(
                "warning: {} {}: fewer than two usable replications, sd reported as 0",
                cell.experiment.name(),
                cell.estimator.name()
            );
        }
    }
    Ok(Status::Ok)
}

fn bench_spec(experiments: Vec<Experiment>, common: &BenchArgs, seed: u64) -> BenchSpec {
    let mut spec = BenchSpec::new(experiments, common.reps, seed);
    spec.workers = common.workers;
    spec.estimators = common
        .estimators
        .iter()
        .map(|e| match e {
            EstimatorArg::Ewa => EstimatorKind::Ewa,
            EstimatorArg::Lasso => EstimatorKind::Lasso,
            EstimatorArg::LassoGauss => EstimatorKind::LassoGauss,
        })
        .collect();
    spec.ewa.horizon = common.ewa_horizon;
    spec
}

fn noise(action: &NoiseAction, seed: u64) -> Result<Status> {
    let NoiseAction::Check { family, gamma, draws, sigma, bound, base } = *action;
    let model = match family {
        FamilyArg::Gaussian => NoiseModel::Gaussian { sigma },
        FamilyArg::Rademacher => NoiseModel::Rademacher { sigma },
        FamilyArg::Laplace => NoiseModel::Laplace { sigma },
        FamilyArg::Uniform => NoiseModel::Uniform { sigma },
        FamilyArg::BoundedSymmetric => NoiseModel::BoundedSymmetric {
            bound,
            base: match base {
                BaseArg::Uniform => BoundedBase::Uniform,
                BaseArg::Rademacher => BoundedBase::Rademacher,
                BaseArg::Triangular => BoundedBase::Triangular,
            },
        },
    };
    model.validate()?;
    let verdict = verify_coupling(&model, gamma, draws, seed)?;
    let threshold = beta_threshold(&model);
    let out = json!({
        "config": { "model": model, "gamma": gamma, "draws": draws, "seed": seed },
        "clauses": {
            "marginal": verdict.marginal_ok(),
            "sum_law": verdict.sum_law_ok(),
            "conditional_mean": verdict.conditional_mean_ok(),
        },
        "all_passed": verdict.all_ok(),
        "beta_threshold": threshold_json(threshold.beta_min, threshold.t0),
        "details": verdict,
    });
    emit(None, &out)?;
    Ok(Status::Ok)
}

fn threshold_json(beta_min: f64, t0: f64) -> Value {
    // JSON has no infinity; an absent t0 means the bound holds for every t.
    if t0.is_finite() {
        json!({ "beta_min": beta_min, "t0": t0 })
    } else {
        json!({ "beta_min": beta_min })
    }
}

fn evaluate_bound(kind: &BoundKind) -> Result<Status> {
    let BoundKind::Soi { config } = kind;
    let text = fs::read_to_string(config)?;
    let inputs: SoiInputs = serde_json::from_str(&text).map_err(|e| sparse_ewa::Error::Parse {
        path: config.clone(),
        message: e.to_string(),
    })?;
    let breakdown = soi_breakdown(&inputs)?;
    let kl = if inputs.m() >= 2 {
        Some(kl_sparsity_bound(&inputs.lambda_star, inputs.tau, inputs.alpha)?)
    } else {
        None
    };
    let out = json!({
        "inputs": inputs,
        "breakdown": breakdown,
        "preconditions": inputs.preconditions(),
        "kl_bound": kl,
    });
    emit(None, &out)?;
    Ok(Status::Ok)
}
