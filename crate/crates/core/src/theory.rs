//! Right-hand sides of the risk bounds. These never feed back into
//! estimation; they make the guarantees checkable.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Inputs of the sparsity oracle inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoiInputs {
    pub lambda_star: Vec<f64>,
    pub beta: f64,
    pub tau: f64,
    #[serde(default)]
    pub alpha: f64,
    pub n: usize,
    /// l1 radius of the prior support; infinite when absent.
    #[serde(default = "infinite")]
    pub radius: f64,
    /// `||f_{lambda*} - f||_n^2`.
    #[serde(default)]
    pub bias_term: f64,
    /// `C_{g,f}`; 1 for the identity link.
    #[serde(default = "one")]
    pub link_constant: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn one() -> f64 {
    1.0
}

/// The four terms of the bound and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoiBreakdown {
    pub bias: f64,
    /// `(4 beta / n) sum_j log(1 + |l*_j| / tau)`.
    pub sparsity: f64,
    /// `2 beta (alpha ||l*||_1 + 1) / n`.
    pub l1: f64,
    /// `4 e C tau^2 M`.
    pub approximation: f64,
    pub total: f64,
}

/// Hypotheses of the bound that the inputs violate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoiPreconditions {
    /// `R > 2 M tau`.
    pub radius_ok: bool,
    /// `alpha <= 1 / (4 M tau)`.
    pub alpha_ok: bool,
    /// `||l*||_1 <= R - 2 M tau`.
    pub lambda_star_ok: bool,
}

impl SoiInputs {
    pub fn m(&self) -> usize {
        self.lambda_star.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("beta", self.beta)?;
        check_positive("tau", self.tau)?;
        check_positive("link constant", self.link_constant)?;
        if self.n == 0 || self.lambda_star.is_empty() {
            return Err(Error::Empty("n and M must be positive"));
        }
        if self.alpha < 0.0 || self.bias_term < 0.0 {
            return Err(Error::InvalidParameter(
                "alpha and the bias term must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn preconditions(&self) -> SoiPreconditions {
        let mt2 = 2.0 * self.m() as f64 * self.tau;
        let l1: f64 = self.lambda_star.iter().map(|v| v.abs()).sum();
        SoiPreconditions {
            radius_ok: self.radius > mt2,
            alpha_ok: self.alpha <= 1.0 / (2.0 * mt2),
            lambda_star_ok: l1 <= self.radius - mt2,
        }
    }
}

/// Sparsity oracle inequality right-hand side, term by term.
pub fn soi_breakdown(inputs: &SoiInputs) -> Result<SoiBreakdown> {
    inputs.validate()?;
    let n = inputs.n as f64;
    let m = inputs.m() as f64;
    let log_sum: f64 = inputs
        .lambda_star
        .iter()
        .map(|l| (l.abs() / inputs.tau).ln_1p())
        .sum();
    let l1: f64 = inputs.lambda_star.iter().map(|v| v.abs()).sum();
    let sparsity = 4.0 * inputs.beta / n * log_sum;
    let l1_term = 2.0 * inputs.beta * (inputs.alpha * l1 + 1.0) / n;
    let approximation =
        4.0 * std::f64::consts::E * inputs.link_constant * inputs.tau * inputs.tau * m;
    Ok(SoiBreakdown {
        bias: inputs.bias_term,
        sparsity,
        l1: l1_term,
        approximation,
        total: inputs.bias_term + sparsity + l1_term + approximation,
    })
}

pub fn soi_rhs(inputs: &SoiInputs) -> Result<f64> {
    soi_breakdown(inputs).map(|b| b.total)
}

/// `2 (alpha ||l*||_1 + 1) + 4 sum_j log(1 + |l*_j| / tau)`, a bound on the
/// Kullback-Leibler divergence between the prior and its copy shifted to
/// `l*`. Requires `M >= 2`.
pub fn kl_sparsity_bound(lambda_star: &[f64], tau: f64, alpha: f64) -> Result<f64> {
    if lambda_star.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "the divergence bound needs M >= 2, got {}",
            lambda_star.len()
        )));
    }
    check_positive("tau", tau)?;
    let l1: f64 = lambda_star.iter().map(|v| v.abs()).sum();
    let logs: f64 = lambda_star.iter().map(|l| (l.abs() / tau).ln_1p()).sum();
    Ok(2.0 * (alpha * l1 + 1.0) + 4.0 * logs)
}

/// `min_j ||f_j - f||_n^2 + beta log(M) / n` for aggregation over a finite
/// dictionary with the uniform prior.
pub fn finite_dictionary_rhs(candidate_losses: &[f64], beta: f64, n: usize) -> Result<f64> {
    if candidate_losses.is_empty() {
        return Err(Error::Empty("no candidate losses"));
    }
    check_positive("beta", beta)?;
    if n == 0 {
        return Err(Error::Empty("n must be positive"));
    }
    let best = candidate_losses.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(best + beta * (candidate_losses.len() as f64).ln() / n as f64)
}
