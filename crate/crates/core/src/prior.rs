//! The heavy-tailed sparsity prior
//!
//! ```text
//! pi(dl) ∝ prod_j exp(-huber(alpha * l_j)) / (tau^2 + l_j^2)^2  *  1(||l||_1 <= R)
//! ```
//!
//! Only the unnormalized log-density and its gradient are needed by the
//! Langevin sampler. The normalizing constant is never computed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::rng;

/// Parameters `(alpha, tau, R)` of the sparsity prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorParams {
    pub alpha: f64,
    pub tau: f64,
    /// l1 radius of the support; `f64::INFINITY` for no truncation.
    pub radius: f64,
}

impl PriorParams {
    pub fn new(alpha: f64, tau: f64, radius: f64) -> Result<Self> {
        let params = Self { alpha, tau, radius };
        params.validate()?;
        Ok(params)
    }

    /// `alpha = 0`, `R = infinity`: the configuration used in practice.
    pub fn student(tau: f64) -> Result<Self> {
        Self::new(0.0, tau, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("tau", self.tau)?;
        check_positive("radius", self.radius)?;
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Huber function: `t^2` on `[-1, 1]`, `2|t| - 1` outside.
#[inline]
pub fn huber(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        t * t
    } else {
        2.0 * a - 1.0
    }
}

/// Derivative of [`huber`]: `2t` on `[-1, 1]`, `2 sign(t)` outside.
#[inline]
pub fn huber_prime(t: f64) -> f64 {
    if t.abs() <= 1.0 {
        2.0 * t
    } else {
        2.0 * t.signum()
    }
}

/// `sum_j [-2 log(tau^2 + l_j^2) - huber(alpha l_j)]`, or `-inf` off the
/// support. The constant `tau^{2M} / C` is omitted.
pub fn log_prior_unnorm(lambda: &[f64], params: &PriorParams) -> f64 {
    if l1_norm(lambda) > params.radius {
        return f64::NEG_INFINITY;
    }
    let tau2 = params.tau * params.tau;
    lambda
        .iter()
        .map(|&l| -2.0 * (tau2 + l * l).ln() - huber(params.alpha * l))
        .sum()
}

/// Gradient of [`log_prior_unnorm`]:
/// `-4 l_j / (tau^2 + l_j^2) - alpha * huber'(alpha l_j)`.
pub fn grad_log_prior(lambda: &[f64], params: &PriorParams) -> Result<Vec<f64>> {
    let norm = l1_norm(lambda);
    if norm >= params.radius {
        return Err(Error::OutsideSupport {
            norm,
            radius: params.radius,
        });
    }
    let mut out = vec![0.0; lambda.len()];
    add_grad_log_prior(lambda, params, &mut out);
    Ok(out)
}

/// `out += grad log prior(lambda)`, without the support check.
#[inline]
pub(crate) fn add_grad_log_prior(lambda: &[f64], params: &PriorParams, out: &mut [f64]) {
    let tau2 = params.tau * params.tau;
    let alpha = params.alpha;
    if alpha == 0.0 {
        for (o, &l) in out.iter_mut().zip(lambda) {
            *o -= 4.0 * l / (tau2 + l * l);
        }
    } else {
        for (o, &l) in out.iter_mut().zip(lambda) {
            *o -= 4.0 * l / (tau2 + l * l) + alpha * huber_prime(alpha * l);
        }
    }
}

fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Density `2 tau^3 / (pi (tau^2 + l^2)^2)` of one coordinate of the prior
/// when `alpha = 0` and `R = infinity`.
pub fn marginal_density(lambda: f64, tau: f64) -> f64 {
    let d = tau * tau + lambda * lambda;
    2.0 * tau.powi(3) / (std::f64::consts::PI * d * d)
}

/// CDF of [`marginal_density`]: `1/2 + (atan(u) + u / (1 + u^2)) / pi` with
/// `u = l / tau`.
pub fn marginal_cdf(lambda: f64, tau: f64) -> f64 {
    let u = lambda / tau;
    0.5 + (u.atan() + u / (1.0 + u * u)) / std::f64::consts::PI
}

/// Draws `count` iid coordinates from the untruncated, `alpha = 0` prior.
///
/// With `u = lambda / tau`, `u` is `t_3 / sqrt(3)`, i.e.
/// `Z0 / sqrt(Z1^2 + Z2^2 + Z3^2)` for independent standard normals.
pub fn sample_prior_marginal(params: &PriorParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    if params.alpha != 0.0 || params.radius.is_finite() {
        return Err(Error::Unsupported(
            "exact prior sampling requires alpha = 0 and an infinite radius".into(),
        ));
    }
    let mut rng = rng::stream(seed, 0);
    Ok((0..count)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            let chi2: f64 = (0..3)
                .map(|_| {
                    let g: f64 = rng.sample(StandardNormal);
                    g * g
                })
                .sum();
            params.tau * z / chi2.sqrt()
        })
        .collect())
}
