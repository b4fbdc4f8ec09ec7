//! Unadjusted Langevin Monte-Carlo: constant-step Euler discretization of
//! `dL = grad V(L) dt + sqrt(2) dW`, started at `L_0 = 0`, with trajectory
//! averaging and a step-halving restart when the chain explodes.
//!
//! Averaging convention: with `N = floor(T / h)` iterates `L_0, ..., L_{N-1}`,
//! the estimate is `(h / T') * sum_{k >= k0} L_k` where `k0 = ceil(burn_in / h)`
//! and `T' = T - burn_in`. With no burn-in this is the Riemann sum
//! `(h/T) sum_{k=0}^{N-1} L_k`: the starting point `L_0 = 0` is included and
//! `L_N` is never computed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::linalg;
use crate::potential::Potential;
use crate::rng::{self, StreamRng};

pub const DEFAULT_MAX_RESTARTS: u32 = 8;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e10;
pub const DEFAULT_BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Euler step `h`.
    pub step: f64,
    /// Time horizon `T`.
    pub horizon: f64,
    /// Initial stretch of time excluded from the average.
    pub burn_in: f64,
    pub seed: u64,
    pub max_restarts: u32,
    /// Sup-norm above which an iterate counts as diverged.
    pub divergence_threshold: f64,
    /// Number of batches for the batch-means standard error (0 disables it).
    pub batches: usize,
    /// Keep every `n`-th iterate for diagnostics.
    pub trace_every: Option<usize>,
}

impl SamplerConfig {
    pub fn new(step: f64, horizon: f64, seed: u64) -> Result<Self> {
        let config = Self {
            step,
            horizon,
            burn_in: 0.0,
            seed,
            max_restarts: DEFAULT_MAX_RESTARTS,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            batches: DEFAULT_BATCHES,
            trace_every: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_burn_in(mut self, burn_in: f64) -> Result<Self> {
        self.burn_in = burn_in;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_restarts(mut self, max_restarts: u32) -> Self {
        self.max_restarts = max_restarts;
        self
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = Some(every.max(1));
        self
    }

    pub fn with_batches(mut self, batches: usize) -> Self {
        self.batches = batches;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("step", self.step)?;
        check_positive("divergence threshold", self.divergence_threshold)?;
        if !self.step.is_finite() || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter("step and horizon must be finite".into()));
        }
        if self.horizon < self.step {
            return Err(Error::InvalidParameter(format!(
                "horizon {} is shorter than one step {}",
                self.horizon, self.step
            )));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.horizon) {
            return Err(Error::InvalidParameter(format!(
                "burn-in {} must lie in [0, horizon)",
                self.burn_in
            )));
        }
        Ok(())
    }

    /// `floor(T / h)`, tolerant to the rounding of `T / h` for exact ratios.
    pub fn iterations_for(&self, step: f64) -> usize {
        let ratio = self.horizon / step;
        ((ratio * (1.0 + 1e-12)).floor() as usize).max(1)
    }
}

/// Min, mean and max of `||L_k||_2` over the generated iterates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormSummary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step_index: usize,
    pub time: f64,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerReport {
    /// Time-averaged iterate.
    pub average: Vec<f64>,
    pub restarts_used: u32,
    pub final_step: f64,
    /// Number of iterates `N` of the last attempt.
    pub steps_taken: usize,
    pub diverged: bool,
    pub trace_norm_summary: NormSummary,
    /// Moves rejected for leaving a finite prior support.
    pub support_rejections: usize,
    /// Per-batch averages of the post-burn-in iterates.
    pub batch_means: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TracePoint>,
}

impl SamplerReport {
    /// Batch-means standard error of each coordinate of [`Self::average`].
    /// `None` with fewer than two batches.
    pub fn standard_errors(&self) -> Option<Vec<f64>> {
        let b = self.batch_means.len();
        if b < 2 {
            return None;
        }
        let dim = self.batch_means[0].len();
        Some(
            (0..dim)
                .map(|j| {
                    let mean = self.batch_means.iter().map(|m| m[j]).sum::<f64>() / b as f64;
                    let var = self
                        .batch_means
                        .iter()
                        .map(|m| (m[j] - mean).powi(2))
                        .sum::<f64>()
                        / (b - 1) as f64;
                    (var / b as f64).sqrt()
                })
                .collect(),
        )
    }
}

/// Source of iid standard Gaussian vectors driving the chain.
pub trait GaussianSource {
    fn fill(&mut self, out: &mut [f64]);
}

/// The default source: a ChaCha stream keyed by `(seed, restart index)`.
pub struct SeededGaussian(StreamRng);

impl SeededGaussian {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self(rng::stream(seed, stream))
    }
}

impl GaussianSource for SeededGaussian {
    #[inline]
    fn fill(&mut self, out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = self.0.sample(StandardNormal);
        }
    }
}

/// Sign-flipped copy of another source. Still standard Gaussian, used to
/// couple a chain with its mirror image.
pub struct Negated<G>(pub G);

impl<G: GaussianSource> GaussianSource for Negated<G> {
    fn fill(&mut self, out: &mut [f64]) {
        self.0.fill(out);
        out.iter_mut().for_each(|o| *o = -*o);
    }
}

/// One Euler run with the configured step, no restart.
pub fn run_chain(potential: &Potential, config: &SamplerConfig) -> SamplerReport {
    let mut source = SeededGaussian::new(config.seed, 0);
    run_attempt(potential, config, config.step, &mut source)
}

/// [`run_chain`], restarting from `L_0 = 0` with half the step and a fresh
/// random stream `(seed, restart)` whenever an iterate is non-finite or
/// exceeds the divergence threshold in sup-norm.
pub fn run_with_restarts(potential: &Potential, config: &SamplerConfig) -> SamplerReport {
    run_with_restarts_from(potential, config, |restart| {
        SeededGaussian::new(config.seed, u64::from(restart))
    })
}

/// [`run_with_restarts`] with a caller-provided noise source per attempt.
pub fn run_with_restarts_from<G, F>(
    potential: &Potential,
    config: &SamplerConfig,
    mut make_source: F,
) -> SamplerReport
where
    G: GaussianSource,
    F: FnMut(u32) -> G,
{
    let mut step = config.step;
    let mut last = None;
    for restart in 0..=config.max_restarts {
        let mut source = make_source(restart);
        let mut report = run_attempt(potential, config, step, &mut source);
        report.restarts_used = restart;
        if !report.diverged {
            return report;
        }
        last = Some(report);
        step /= 2.0;
    }
    let mut report = last.expect("at least one attempt is made");
    report.average = vec![0.0; potential.dim()];
    report.batch_means.clear();
    report
}

fn run_attempt<G: GaussianSource>(
    potential: &Potential,
    config: &SamplerConfig,
    step: f64,
    source: &mut G,
) -> SamplerReport {
    let dim = potential.dim();
    let iterations = config.iterations_for(step);
    let first_averaged = ((config.burn_in / step) * (1.0 - 1e-12)).ceil() as usize;
    let first_averaged = first_averaged.min(iterations - 1);
    let averaged = iterations - first_averaged;
    let batches = config.batches.min(averaged);
    let noise_scale = (2.0 * step).sqrt();
    let radius = if potential.has_prior() { potential.prior().radius } else { f64::INFINITY };

    let mut state = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut noise = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    let mut batch_sum = vec![0.0; dim];
    let mut batch_means = Vec::with_capacity(batches);
    let mut batch_count = 0usize;
    let mut trace = Vec::new();
    let mut norms = NormStats::default();
    let mut support_rejections = 0;

    let report = |average: Vec<f64>,
                      steps_taken: usize,
                      diverged: bool,
                      norms: &NormStats,
                      support_rejections: usize,
                      batch_means: Vec<Vec<f64>>,
                      trace: Vec<TracePoint>| SamplerReport {
        average,
        restarts_used: 0,
        final_step: step,
        steps_taken,
        diverged,
        trace_norm_summary: norms.summary(),
        support_rejections,
        batch_means,
        trace,
    };

    for k in 0..iterations {
        if k >= first_averaged {
            linalg::axpy(1.0, &state, &mut sum);
            if batches > 0 {
                linalg::axpy(1.0, &state, &mut batch_sum);
                batch_count += 1;
                let index = k - first_averaged;
                let batch_end = (batch_means.len() + 1) * averaged / batches;
                if index + 1 == batch_end {
                    let inv = 1.0 / batch_count as f64;
                    batch_means.push(batch_sum.iter().map(|s| s * inv).collect());
                    batch_sum.iter_mut().for_each(|s| *s = 0.0);
                    batch_count = 0;
                }
            }
        }
        if let Some(every) = config.trace_every {
            if k % every == 0 {
                trace.push(TracePoint {
                    step_index: k,
                    time: k as f64 * step,
                    coords: state.clone(),
                });
            }
        }
        if k + 1 == iterations {
            break;
        }

        potential.gradient_into(&state, &mut grad);
        source.fill(&mut noise);
        let mut sup = 0.0f64;
        let mut finite = true;
        for (((x, &s), &g), &z) in next.iter_mut().zip(&state).zip(&grad).zip(&noise) {
            *x = s + step * g + noise_scale * z;
            finite &= x.is_finite();
            sup = sup.max(x.abs());
        }
        if !finite || sup > config.divergence_threshold {
            return report(
                vec![0.0; dim],
                k + 1,
                true,
                &norms,
                support_rejections,
                Vec::new(),
                trace,
            );
        }
        if radius.is_finite() && next.iter().map(|v| v.abs()).sum::<f64>() > radius {
            support_rejections += 1;
        } else {
            std::mem::swap(&mut state, &mut next);
        }
        norms.push(linalg::norm_sq(&state).sqrt());
    }

    let weight = step / (config.horizon - config.burn_in);
    sum.iter_mut().for_each(|s| *s *= weight);
    report(
        sum,
        iterations,
        false,
        &norms,
        support_rejections,
        batch_means,
        trace,
    )
}

#[derive(Default)]
struct NormStats {
    min: f64,
    max: f64,
    total: f64,
    count: usize,
}

impl NormStats {
    #[inline]
    fn push(&mut self, value: f64) {
        if self.count == 0 {
            self.min = value;
            self.max = value;
        } else {
            self.min = self.min.min(value);
            self.max = self.max.max(value);
        }
        self.total += value;
        self.count += 1;
    }

    fn summary(&self) -> NormSummary {
        if self.count == 0 {
            return NormSummary::default();
        }
        NormSummary {
            min: self.min,
            mean: self.total / self.count as f64,
            max: self.max,
        }
    }
}
