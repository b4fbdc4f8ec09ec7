use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::model::{GramCache, RegressionDataset};
use crate::potential::Potential;
use crate::prior::PriorParams;
use crate::sampler::{self, SamplerConfig, SamplerReport, DEFAULT_BATCHES, DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_MAX_RESTARTS};

/// Tuning of the Langevin-computed EWA. `None` fields are derived from the
/// data by [`resolve_tuning`]:
///
/// * `beta = 4 sigma^2`
/// * `tau = 4 sigma / sqrt(Tr(X^T X))`
/// * `step = beta / Tr(X^T X)` (which is `beta / (M n)` for a normalized design)
/// * `horizon = n`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EwaConfig {
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub alpha: f64,
    pub radius: f64,
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub burn_in: f64,
    pub seed: u64,
    pub max_restarts: u32,
    pub divergence_threshold: f64,
    pub batches: usize,
    pub trace_every: Option<usize>,
}

impl Default for EwaConfig {
    fn default() -> Self {
        Self {
            beta: None,
            tau: None,
            alpha: 0.0,
            radius: f64::INFINITY,
            step: None,
            horizon: None,
            burn_in: 0.0,
            seed: 0,
            max_restarts: DEFAULT_MAX_RESTARTS,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            batches: DEFAULT_BATCHES,
            trace_every: None,
        }
    }
}

impl EwaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn needs_sigma(&self) -> bool {
        self.beta.is_none() || self.tau.is_none() || self.step.is_none()
    }
}

/// Fully specified EWA configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEwaConfig {
    pub beta: f64,
    pub prior: PriorParams,
    pub sampler: SamplerConfig,
    /// `h * (2 / beta) * ||X^T X||_2`; Euler on the quadratic part is stable
    /// below 2.
    pub stability_index: f64,
    pub warnings: Vec<String>,
}

/// Fills the automatic fields of `config`. Fails when an automatic field
/// needs the noise level and the dataset has none.
pub fn resolve_tuning(dataset: &RegressionDataset, config: &EwaConfig) -> Result<ResolvedEwaConfig> {
    resolve_with_gram(dataset.noise_level(), &GramCache::new(dataset), config)
}

pub(crate) fn resolve_with_gram(
    sigma: Option<f64>,
    gram: &GramCache,
    config: &EwaConfig,
) -> Result<ResolvedEwaConfig> {
    let sigma = match (sigma, config.needs_sigma()) {
        (Some(s), _) => s,
        (None, true) => return Err(Error::MissingNoiseLevel),
        (None, false) => f64::NAN,
    };
    let trace = gram.trace_xtx;
    if config.needs_sigma() && (trace.is_nan() || trace <= 0.0) {
        return Err(Error::InvalidParameter(
            "automatic tuning needs a design with nonzero trace".into(),
        ));
    }
    let beta = config.beta.unwrap_or(4.0 * sigma * sigma);
    let tau = config.tau.unwrap_or_else(|| 4.0 * sigma / trace.sqrt());
    check_positive("beta", beta)?;
    let step = config.step.unwrap_or(beta / trace);
    let horizon = config.horizon.unwrap_or(gram.n_samples as f64);

    let prior = PriorParams::new(config.alpha, tau, config.radius)?;
    let sampler = SamplerConfig {
        step,
        horizon,
        burn_in: config.burn_in,
        seed: config.seed,
        max_restarts: config.max_restarts,
        divergence_threshold: config.divergence_threshold,
        batches: config.batches,
        trace_every: config.trace_every,
    };
    sampler.validate()?;

    let stability_index = step * (2.0 / beta) * gram.xtx.spectral_norm_psd();
    let mut warnings = Vec::new();
    if stability_index > 2.0 {
        warnings.push(format!(
            "step {step:e} exceeds the Euler stability limit of the quadratic part \
             (h * (2/beta) * ||X^T X|| = {stability_index:.3} > 2); expect restarts"
        ));
    }
    Ok(ResolvedEwaConfig {
        beta,
        prior,
        sampler,
        stability_index,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EwaFit {
    pub estimate: Vec<f64>,
    pub report: SamplerReport,
    pub config: ResolvedEwaConfig,
}

impl EwaFit {
    pub fn diverged(&self) -> bool {
        self.report.diverged
    }
}

/// EWA with the sparsity prior, approximated by the averaged Langevin chain.
/// A diverged chain is reported through `report.diverged`, not as an error.
pub fn ewa_fit(dataset: &RegressionDataset, config: &EwaConfig) -> Result<EwaFit> {
    let gram = Arc::new(GramCache::new(dataset));
    let resolved = resolve_with_gram(dataset.noise_level(), &gram, config)?;
    ewa_fit_with_gram(gram, &resolved)
}

/// [`ewa_fit`] on a precomputed Gram cache and resolved configuration.
pub fn ewa_fit_with_gram(gram: Arc<GramCache>, config: &ResolvedEwaConfig) -> Result<EwaFit> {
    let potential = Potential::new(gram, config.beta, config.prior)?;
    let report = sampler::run_with_restarts(&potential, &config.sampler);
    Ok(EwaFit {
        estimate: report.average.clone(),
        report,
        config: config.clone(),
    })
}
