//! Noise laws and the couplings `(xi, zeta)` showing that each law satisfies
//! the exchangeability-type noise condition behind the EWA oracle
//! inequality:
//!
//! 1. `xi + zeta` has the law of `(1 + gamma) xi`,
//! 2. `E[zeta | xi] = 0`,
//! 3. a bound on the conditional Laplace transform of `zeta`, summarized by
//!    the minimal temperature [`beta_threshold`].
//!
//! [`verify_coupling`] checks the first two clauses (and the declared
//! marginal of `xi`) statistically.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::rng::{self, StreamRng};
use crate::stats::{self, BinMean, KsOutcome};

/// Symmetric law on `[-B, B]` used by [`NoiseModel::BoundedSymmetric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedBase {
    /// Uniform on `[-B, B]`.
    Uniform,
    /// `+-B` with probability 1/2 each.
    Rademacher,
    /// Triangular density on `[-B, B]` with mode 0.
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseModel {
    Gaussian { sigma: f64 },
    /// `+-sigma` with probability 1/2.
    Rademacher { sigma: f64 },
    /// Laplace law with variance `sigma^2`.
    Laplace { sigma: f64 },
    /// Symmetric uniform law with variance `sigma^2`, support `[-sigma sqrt 3, sigma sqrt 3]`.
    Uniform { sigma: f64 },
    BoundedSymmetric { bound: f64, base: BoundedBase },
}

/// Realization of a coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSample {
    pub xi: f64,
    pub zeta: f64,
    pub gamma: f64,
}

/// Minimal admissible temperature `beta >= max(beta_min, 2 L / t0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaThreshold {
    pub beta_min: f64,
    /// `f64::INFINITY` when the Laplace-transform bound holds for all `t`.
    pub t0: f64,
}

impl BetaThreshold {
    /// `max(beta_min, 2 L / t0)` for a dictionary with sup-deviation bound `L`.
    pub fn for_bound(&self, dictionary_bound: f64) -> f64 {
        if self.t0.is_infinite() {
            self.beta_min
        } else {
            self.beta_min.max(2.0 * dictionary_bound / self.t0)
        }
    }
}

impl NoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Gaussian { .. } => "gaussian",
            NoiseModel::Rademacher { .. } => "rademacher",
            NoiseModel::Laplace { .. } => "laplace",
            NoiseModel::Uniform { .. } => "uniform",
            NoiseModel::BoundedSymmetric { .. } => "bounded_symmetric",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Gaussian { sigma }
            | NoiseModel::Rademacher { sigma }
            | NoiseModel::Laplace { sigma }
            | NoiseModel::Uniform { sigma } => check_positive("sigma", sigma),
            NoiseModel::BoundedSymmetric { bound, .. } => check_positive("bound", bound),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma }
            | NoiseModel::Rademacher { sigma }
            | NoiseModel::Laplace { sigma }
            | NoiseModel::Uniform { sigma } => sigma * sigma,
            NoiseModel::BoundedSymmetric { bound, base } => {
                bound * bound
                    * match base {
                        BoundedBase::Uniform => 1.0 / 3.0,
                        BoundedBase::Rademacher => 1.0,
                        BoundedBase::Triangular => 1.0 / 6.0,
                    }
            }
        }
    }

    /// One draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseModel::Rademacher { sigma } => random_sign(rng) * sigma,
            NoiseModel::Laplace { sigma } => {
                random_sign(rng) * sigma / std::f64::consts::SQRT_2 * rng.sample::<f64, _>(Exp1)
            }
            NoiseModel::Uniform { sigma } => {
                sigma * 3f64.sqrt() * rng.random_range(-1.0..=1.0)
            }
            NoiseModel::BoundedSymmetric { bound, base } => {
                bound
                    * match base {
                        BoundedBase::Uniform => rng.random_range(-1.0..=1.0),
                        BoundedBase::Rademacher => random_sign(rng),
                        BoundedBase::Triangular => {
                            0.5 * (rng.random_range(-1.0..=1.0) + rng.random_range(-1.0..=1.0))
                        }
                    }
            }
        }
    }

    /// `count` iid draws from the seeded stream `(seed, 0)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng::stream(seed, 0);
        self.sample_with(&mut rng, count)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    /// CDF of the law.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_impl(x, false)
    }

    /// Left limit of the CDF, `P(xi < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.cdf_impl(x, true)
    }

    fn cdf_impl(&self, x: f64, left: bool) -> f64 {
        let two_point = |s: f64| {
            let below = if left { x <= -s } else { x < -s };
            let above = if left { x > s } else { x >= s };
            if below {
                0.0
            } else if above {
                1.0
            } else {
                0.5
            }
        };
        match *self {
            NoiseModel::Gaussian { sigma } => stats::normal_cdf(x / sigma),
            NoiseModel::Rademacher { sigma } => two_point(sigma),
            NoiseModel::Laplace { sigma } => {
                let b = sigma / std::f64::consts::SQRT_2;
                if x < 0.0 {
                    0.5 * (x / b).exp()
                } else {
                    1.0 - 0.5 * (-x / b).exp()
                }
            }
            NoiseModel::Uniform { sigma } => {
                let a = sigma * 3f64.sqrt();
                ((x + a) / (2.0 * a)).clamp(0.0, 1.0)
            }
            NoiseModel::BoundedSymmetric { bound, base } => match base {
                BoundedBase::Uniform => ((x + bound) / (2.0 * bound)).clamp(0.0, 1.0),
                BoundedBase::Rademacher => two_point(bound),
                BoundedBase::Triangular => {
                    let u = (x / bound).clamp(-1.0, 1.0);
                    if u < 0.0 {
                        0.5 * (1.0 + u).powi(2)
                    } else {
                        1.0 - 0.5 * (1.0 - u).powi(2)
                    }
                }
            },
        }
    }

    /// Draws `zeta` for a given `xi` with the construction attached to the
    /// family. Uniform noise uses the bounded-symmetric construction with
    /// `B = sigma sqrt 3`.
    pub fn couple<R: Rng + ?Sized>(&self, xi: f64, gamma: f64, rng: &mut R) -> Result<CouplingSample> {
        match *self {
            NoiseModel::Gaussian { sigma } => couple_gaussian(xi, gamma, sigma, rng),
            NoiseModel::Rademacher { sigma } => couple_rademacher(xi, gamma, sigma, rng),
            NoiseModel::Laplace { sigma } => couple_laplace(xi, gamma, sigma, rng),
            NoiseModel::Uniform { .. } | NoiseModel::BoundedSymmetric { .. } => {
                couple_bounded_symmetric(xi, gamma, rng)
            }
        }
    }
}

#[inline]
fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Sign with `sgn(0) = 1`; the tie has probability zero in every use.
#[inline]
fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    check_positive("gamma", gamma)
}

/// `zeta ~ N(0, (2 gamma + gamma^2) sigma^2)` independent of `xi`.
pub fn couple_gaussian<R: Rng + ?Sized>(
    xi: f64,
    gamma: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<CouplingSample> {
    check_gamma(gamma)?;
    check_positive("sigma", sigma)?;
    let sd = ((2.0 * gamma + gamma * gamma) * sigma * sigma).sqrt();
    let z: f64 = rng.sample(StandardNormal);
    Ok(CouplingSample {
        xi,
        zeta: sd * z,
        gamma,
    })
}

/// `zeta = (1 + gamma) sigma sgn(xi / sigma - (1 + gamma) U) - xi`,
/// `U ~ U[-1, 1]` independent of `xi`.
pub fn couple_rademacher<R: Rng + ?Sized>(
    xi: f64,
    gamma: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<CouplingSample> {
    check_gamma(gamma)?;
    check_positive("sigma", sigma)?;
    if (xi.abs() - sigma).abs() > 1e-12 * sigma {
        return Err(Error::OutsideNoiseSupport {
            family: "rademacher",
            value: xi,
        });
    }
    let u: f64 = rng.random_range(-1.0..=1.0);
    let g = 1.0 + gamma;
    Ok(CouplingSample {
        xi,
        zeta: g * sigma * sgn(xi / sigma - g * u) - xi,
        gamma,
    })
}

/// `zeta` independent of `xi`: `0` with probability `1 / (1 + gamma)^2`,
/// otherwise Laplace with variance `(1 + gamma)^2 sigma^2`.
///
/// The weight is the `t -> infinity` limit of the characteristic function
/// [`laplace_zeta_cf`]; the remaining mass carries the Laplace component.
pub fn couple_laplace<R: Rng + ?Sized>(
    xi: f64,
    gamma: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<CouplingSample> {
    check_gamma(gamma)?;
    check_positive("sigma", sigma)?;
    let g = 1.0 + gamma;
    let atom = 1.0 / (g * g);
    let zeta = if rng.random::<f64>() < atom {
        0.0
    } else {
        NoiseModel::Laplace { sigma: g * sigma }.draw(rng)
    };
    Ok(CouplingSample { xi, zeta, gamma })
}

/// Characteristic function of the Laplace-coupling `zeta`:
/// `(1 + (2 gamma + gamma^2) / (1 + (1 + gamma)^2 (sigma t)^2 / 2)) / (1 + gamma)^2`.
pub fn laplace_zeta_cf(t: f64, gamma: f64, sigma: f64) -> f64 {
    let g2 = (1.0 + gamma).powi(2);
    (1.0 + (2.0 * gamma + gamma * gamma) / (1.0 + g2 * (sigma * t).powi(2) / 2.0)) / g2
}

/// `zeta = (1 + gamma) |xi| sgn(sgn(xi) - (1 + gamma) U) - xi`,
/// `U ~ U[-1, 1]` independent of `xi`. Valid for any symmetric bounded `xi`.
pub fn couple_bounded_symmetric<R: Rng + ?Sized>(
    xi: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<CouplingSample> {
    check_gamma(gamma)?;
    let u: f64 = rng.random_range(-1.0..=1.0);
    let g = 1.0 + gamma;
    let zeta = if xi == 0.0 {
        0.0
    } else {
        g * xi.abs() * sgn(sgn(xi) - g * u) - xi
    };
    Ok(CouplingSample { xi, zeta, gamma })
}

/// Minimal temperature for each family: `4 sigma^2` (Gaussian, Rademacher,
/// uniform), `8 sigma^2` with `t0 = 1 / sigma^2` (Laplace), `4 B^2` (bounded).
pub fn beta_threshold(model: &NoiseModel) -> BetaThreshold {
    match *model {
        NoiseModel::Gaussian { sigma }
        | NoiseModel::Rademacher { sigma }
        | NoiseModel::Uniform { sigma } => BetaThreshold {
            beta_min: 4.0 * sigma * sigma,
            t0: f64::INFINITY,
        },
        NoiseModel::Laplace { sigma } => BetaThreshold {
            beta_min: 8.0 * sigma * sigma,
            t0: 1.0 / (sigma * sigma),
        },
        NoiseModel::BoundedSymmetric { bound, .. } => BetaThreshold {
            beta_min: 4.0 * bound * bound,
            t0: f64::INFINITY,
        },
    }
}

/// Draws `count` coupled pairs from stream `(seed, 1)`.
pub fn sample_couplings(
    model: &NoiseModel,
    gamma: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<CouplingSample>> {
    model.validate()?;
    let mut rng: StreamRng = rng::stream(seed, 1);
    (0..count)
        .map(|_| {
            let xi = model.draw(&mut rng);
            model.couple(xi, gamma, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseCheck {
    pub passed: bool,
    pub detail: String,
}

/// Statistical verdict on a coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingVerdict {
    pub family: String,
    pub gamma: f64,
    pub draws: usize,
    /// One-sample KS of `xi` against the declared law.
    pub marginal: KsOutcome,
    /// Two-sample KS of `xi + zeta` against `(1 + gamma) xi'`.
    pub sum_law: KsOutcome,
    /// `E[zeta | xi in bin]`, 20 equal-count bins.
    pub conditional_mean: Vec<BinMean>,
}

impl CouplingVerdict {
    pub fn marginal_ok(&self) -> bool {
        self.marginal.passes()
    }

    pub fn sum_law_ok(&self) -> bool {
        self.sum_law.passes()
    }

    pub fn conditional_mean_ok(&self) -> bool {
        self.conditional_mean.iter().all(|b| b.within(3.0))
    }

    pub fn all_ok(&self) -> bool {
        self.marginal_ok() && self.sum_law_ok() && self.conditional_mean_ok()
    }
}

pub const VERIFY_BINS: usize = 20;

/// `zeta` is computed as `target - xi`, so `xi + zeta` can land a few ulps
/// away from the atoms of discrete laws; values this close count as ties.
fn tie_tolerance(sample: &[f64]) -> f64 {
    1e-12 * sample.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Runs the three statistical checks on `draws` coupled pairs.
///
/// `xi'` for the two-sample test is an independent sample of the same size
/// drawn from stream `(seed, 2)`.
pub fn verify_coupling(
    model: &NoiseModel,
    gamma: f64,
    draws: usize,
    seed: u64,
) -> Result<CouplingVerdict> {
    if draws < 2 * VERIFY_BINS {
        return Err(Error::InvalidParameter(format!(
            "need at least {} draws, got {draws}",
            2 * VERIFY_BINS
        )));
    }
    let pairs = sample_couplings(model, gamma, draws, seed)?;
    let xi: Vec<f64> = pairs.iter().map(|p| p.xi).collect();
    let zeta: Vec<f64> = pairs.iter().map(|p| p.zeta).collect();
    let sums: Vec<f64> = pairs.iter().map(|p| p.xi + p.zeta).collect();
    let mut rng = rng::stream(seed, 2);
    let scaled: Vec<f64> = (0..draws)
        .map(|_| (1.0 + gamma) * model.draw(&mut rng))
        .collect();

    Ok(CouplingVerdict {
        family: model.name().to_string(),
        gamma,
        draws,
        marginal: stats::ks_one_sample(&xi, |x| model.cdf(x), |x| model.cdf_left(x)),
        sum_law: stats::ks_two_sample_tol(&sums, &scaled, tie_tolerance(&scaled)),
        conditional_mean: stats::binned_means(&xi, &zeta, VERIFY_BINS),
    })
}
