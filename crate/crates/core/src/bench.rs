//! Replication harness for the two synthetic experiments.
//!
//! Replication `r` of every cell uses the dataset seed
//! `derive_seed(base_seed, r)`; the EWA chain gets its own seed derived from
//! the dataset seed. Work items are independent and results are collected in
//! replication order, so the report does not depend on the worker count.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{gen_example1, gen_example2, Example1Spec, Example2Spec};
use crate::error::{Error, Result};
use crate::estimators::{
    ewa_fit_with_gram, lasso_fit, lasso_gauss_ideal_with, EwaConfig, LassoConfig, DEFAULT_GRID_SIZE,
};
use crate::estimators::ewa::resolve_with_gram;
use crate::linalg::Matrix;
use crate::model::{coefficient_loss, functional_loss, rectangle_gram, GramCache, RegressionDataset};
use crate::rng::derive_seed;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    /// Rademacher compressed sensing, loss `||lambda - lambda*||^2`.
    Example1 { n: usize, m: usize, s: usize },
    /// Rectangle image on the unit square, loss in `L2([0,1]^2)`.
    Example2 { k: usize, n: usize, sigma: f64 },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Example1 { .. } => "example1",
            Experiment::Example2 { .. } => "example2",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Experiment::Example1 { n, .. } | Experiment::Example2 { n, .. } => n,
        }
    }

    pub fn m(&self) -> usize {
        match *self {
            Experiment::Example1 { m, .. } => m,
            Experiment::Example2 { k, .. } => k * k,
        }
    }

    /// `S` for the first experiment, `sigma` for the second.
    pub fn s_or_sigma(&self) -> f64 {
        match *self {
            Experiment::Example1 { s, .. } => s as f64,
            Experiment::Example2 { sigma, .. } => sigma,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<RegressionDataset> {
        match *self {
            Experiment::Example1 { n, m, s } => gen_example1(&Example1Spec { n, m, s, seed }),
            Experiment::Example2 { k, n, sigma } => gen_example2(&Example2Spec { k, n, sigma, seed }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Ewa,
    Lasso,
    LassoGauss,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Ewa, EstimatorKind::Lasso, EstimatorKind::LassoGauss];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Ewa => "ewa",
            EstimatorKind::Lasso => "lasso",
            EstimatorKind::LassoGauss => "lasso_gauss",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub experiments: Vec<Experiment>,
    pub estimators: Vec<EstimatorKind>,
    pub replications: usize,
    pub base_seed: u64,
    pub workers: usize,
    /// EWA settings; `None` fields use the automatic tuning. The seed is
    /// ignored and derived per replication.
    pub ewa: EwaConfig,
    pub lasso: LassoConfig,
    pub grid_size: usize,
}

impl BenchSpec {
    pub fn new(experiments: Vec<Experiment>, replications: usize, base_seed: u64) -> Self {
        Self {
            experiments,
            estimators: EstimatorKind::ALL.to_vec(),
            replications,
            base_seed,
            workers: 1,
            ewa: EwaConfig::default(),
            lasso: LassoConfig::default(),
            grid_size: DEFAULT_GRID_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        if self.experiments.is_empty() || self.estimators.is_empty() {
            return Err(Error::Empty("bench needs at least one experiment and one estimator"));
        }
        self.lasso.validate()
    }
}

/// Statistics of one (experiment, estimator) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub experiment: Experiment,
    pub estimator: EstimatorKind,
    pub mean_loss: f64,
    /// Sample standard deviation (n - 1 denominator); 0 when undefined.
    pub sd_loss: f64,
    /// False when fewer than two replications entered the statistics.
    pub sd_defined: bool,
    /// Replications that entered the statistics.
    pub reps: usize,
    pub divergences: usize,
    /// Summed wall time of this estimator over all replications.
    pub seconds: f64,
    /// Per-replication losses in replication order, `None` when diverged.
    pub losses: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
}

pub const CSV_HEADER: &str = "experiment,n,M,S_or_sigma,estimator,mean_loss,sd_loss,reps,divergences,seconds";

impl BenchReport {
    pub fn cell(&self, experiment: &Experiment, estimator: EstimatorKind) -> Option<&BenchCell> {
        self.cells
            .iter()
            .find(|c| &c.experiment == experiment && c.estimator == estimator)
    }

    /// The CSV table. Wall times vary from run to run, so the `seconds`
    /// column is left empty unless `with_timing` is set.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let seconds = if with_timing { format!("{:.3}", c.seconds) } else { String::new() };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                c.experiment.name(),
                c.experiment.n(),
                c.experiment.m(),
                c.experiment.s_or_sigma(),
                c.estimator.name(),
                c.mean_loss,
                c.sd_loss,
                c.reps,
                c.divergences,
                seconds
            ));
        }
        out
    }
}

struct Outcome {
    loss: Option<f64>,
    seconds: f64,
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    let mut estimators = spec.estimators.clone();
    estimators.sort();
    estimators.dedup();

    let grams: Vec<Option<Arc<Matrix>>> = spec
        .experiments
        .iter()
        .map(|e| match *e {
            Experiment::Example2 { k, .. } => rectangle_gram(k).map(|g| Some(Arc::new(g))),
            Experiment::Example1 { .. } => Ok(None),
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..spec.experiments.len())
        .flat_map(|c| (0..spec.replications).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Vec<Outcome>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| {
                run_replication(spec, &spec.experiments[c], grams[c].as_deref(), &estimators, r as u64)
            })
            .collect::<Result<_>>()
    })?;

    let mut cells = Vec::new();
    for (c, experiment) in spec.experiments.iter().enumerate() {
        let rows = &results[c * spec.replications..(c + 1) * spec.replications];
        for (e, &estimator) in estimators.iter().enumerate() {
            let losses: Vec<Option<f64>> = rows.iter().map(|row| row[e].loss).collect();
            let kept: Vec<f64> = losses.iter().flatten().copied().collect();
            let seconds = rows.iter().map(|row| row[e].seconds).sum();
            let sd = stats::sample_variance(&kept).map(f64::sqrt);
            let (mean_loss, sd_loss, sd_defined) = (stats::mean(&kept), sd.unwrap_or(0.0), sd.is_some());
            cells.push(BenchCell {
                experiment: *experiment,
                estimator,
                mean_loss,
                sd_loss,
                sd_defined,
                reps: kept.len(),
                divergences: losses.len() - kept.len(),
                seconds,
                losses,
            });
        }
    }
    Ok(BenchReport { cells })
}

fn run_replication(
    spec: &BenchSpec,
    experiment: &Experiment,
    rect_gram: Option<&Matrix>,
    estimators: &[EstimatorKind],
    replication: u64,
) -> Result<Vec<Outcome>> {
    let seed = derive_seed(spec.base_seed, replication);
    let dataset = experiment.generate(seed)?;
    let truth = dataset.truth().expect("generated datasets carry the truth").to_vec();
    let loss = |estimate: &[f64]| -> Result<f64> {
        match rect_gram {
            Some(g) => {
                let delta: Vec<f64> = estimate.iter().zip(&truth).map(|(a, b)| a - b).collect();
                functional_loss(&delta, g)
            }
            None => coefficient_loss(estimate, &truth),
        }
    };

    let mut outcomes = Vec::with_capacity(estimators.len());
    for estimator in estimators {
        let start = Instant::now();
        let value = match estimator {
            EstimatorKind::Ewa => {
                let gram = Arc::new(GramCache::new(&dataset));
                let config = EwaConfig { seed: derive_seed(seed, 1), ..spec.ewa.clone() };
                let resolved = resolve_with_gram(dataset.noise_level(), &gram, &config)?;
                let fit = ewa_fit_with_gram(gram, &resolved)?;
                if fit.diverged() {
                    None
                } else {
                    Some(loss(&fit.estimate)?)
                }
            }
            EstimatorKind::Lasso => Some(loss(&lasso_fit(&dataset, &spec.lasso)?.coefficients)?),
            EstimatorKind::LassoGauss => Some(lasso_gauss_ideal_with(&dataset, spec.grid_size, loss)?.loss),
        };
        outcomes.push(Outcome {
            loss: value,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(outcomes)
}
