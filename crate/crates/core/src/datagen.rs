//! Reproducible synthetic instances.
//!
//! Every generator draws the design from stream `(seed, 0)` and the noise
//! from stream `(seed, 1)`, so the same seed always yields the same dataset
//! and the noise does not depend on how many draws the design consumed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{rectangle_indicator, RegressionDataset};
use crate::noise::NoiseModel;
use crate::rng;

/// Compressed-sensing instance: Rademacher design, `lambda*_j = 1(j <= S)`,
/// Gaussian noise with `sigma^2 = S / 9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example1Spec {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub seed: u64,
}

/// Image-denoising instance on the unit square with the `k^2` rectangle
/// indicators as dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example2Spec {
    pub k: usize,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl Example2Spec {
    pub const DEFAULT_K: usize = 15;
}

/// 1-based positions of the nonzero coefficients of the rectangle image.
pub const EXAMPLE2_SUPPORT: [usize; 3] = [10, 100, 200];

pub fn gen_example1(spec: &Example1Spec) -> Result<RegressionDataset> {
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::Empty("n and M must be positive"));
    }
    if spec.s > spec.m {
        return Err(Error::InvalidParameter(format!(
            "sparsity S = {} exceeds M = {}",
            spec.s, spec.m
        )));
    }
    let sigma = (spec.s as f64 / 9.0).sqrt();
    let mut design_rng = rng::stream(spec.seed, 0);
    let design = Matrix::from_fn(spec.n, spec.m, |_, _| {
        if design_rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    });
    let truth: Vec<f64> = (0..spec.m).map(|j| if j < spec.s { 1.0 } else { 0.0 }).collect();
    let mut noise_rng = rng::stream(spec.seed, 1);
    let noise: Vec<f64> = (0..spec.n)
        .map(|_| sigma * noise_rng.sample::<f64, _>(StandardNormal))
        .collect();
    assemble(design, truth, &noise, (sigma > 0.0).then_some(sigma))
}

/// 0-based support of the rectangle image for grid size `k`: the 1-based
/// indices 10, 100, 200 clipped to `k^2` and deduplicated.
pub fn example2_support(k: usize) -> Vec<usize> {
    let m = k * k;
    let mut support: Vec<usize> = EXAMPLE2_SUPPORT.iter().map(|&i| i.min(m) - 1).collect();
    support.dedup();
    support
}

pub fn gen_example2(spec: &Example2Spec) -> Result<RegressionDataset> {
    if spec.k == 0 || spec.n == 0 {
        return Err(Error::Empty("k and n must be positive"));
    }
    let m = spec.k * spec.k;
    let mut design_rng = rng::stream(spec.seed, 0);
    let points: Vec<[f64; 2]> = (0..spec.n)
        .map(|_| [design_rng.random::<f64>(), design_rng.random::<f64>()])
        .collect();
    let design = Matrix::from_fn(spec.n, m, |i, l| rectangle_indicator(spec.k, l, points[i]));
    let mut truth = vec![0.0; m];
    for j in example2_support(spec.k) {
        truth[j] = 1.0;
    }
    let mut noise_rng = rng::stream(spec.seed, 1);
    let noise: Vec<f64> = (0..spec.n)
        .map(|_| spec.sigma * noise_rng.sample::<f64, _>(StandardNormal))
        .collect();
    assemble(design, truth, &noise, (spec.sigma > 0.0).then_some(spec.sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignFamily {
    /// Entries `+-1`.
    Rademacher,
    /// Standard Gaussian entries, each column rescaled to norm `sqrt(n)`.
    NormalizedGaussian,
    /// Standard Gaussian entries, unscaled.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericSpec {
    pub n: usize,
    pub m: usize,
    /// 0-based indices of the nonzero coefficients.
    pub support: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub design: DesignFamily,
    /// `None` for noiseless responses.
    pub noise: Option<NoiseModel>,
    pub seed: u64,
}

pub fn gen_generic(spec: &GenericSpec) -> Result<RegressionDataset> {
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::Empty("n and M must be positive"));
    }
    if spec.support.len() != spec.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            what: "amplitudes",
            expected: spec.support.len(),
            got: spec.amplitudes.len(),
        });
    }
    let mut truth = vec![0.0; spec.m];
    for (&j, &a) in spec.support.iter().zip(&spec.amplitudes) {
        if j >= spec.m {
            return Err(Error::IndexOutOfRange { index: j, dim: spec.m });
        }
        truth[j] = a;
    }
    let mut design_rng = rng::stream(spec.seed, 0);
    let mut design = Matrix::from_fn(spec.n, spec.m, |_, _| match spec.design {
        DesignFamily::Rademacher => {
            if design_rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        DesignFamily::Gaussian | DesignFamily::NormalizedGaussian => {
            design_rng.sample(StandardNormal)
        }
    });
    if spec.design == DesignFamily::NormalizedGaussian {
        let target = (spec.n as f64).sqrt();
        for j in 0..spec.m {
            let norm = design.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for i in 0..spec.n {
                    design.set(i, j, design.get(i, j) * target / norm);
                }
            }
        }
    }
    let (noise, sigma) = match &spec.noise {
        Some(model) => {
            model.validate()?;
            let mut noise_rng = rng::stream(spec.seed, 1);
            (
                model.sample_with(&mut noise_rng, spec.n),
                Some(model.variance().sqrt()),
            )
        }
        None => (vec![0.0; spec.n], None),
    };
    assemble(design, truth, &noise, sigma)
}

fn assemble(
    design: Matrix,
    truth: Vec<f64>,
    noise: &[f64],
    sigma: Option<f64>,
) -> Result<RegressionDataset> {
    let signal = design.matvec(&truth)?;
    let responses = signal.iter().zip(noise).map(|(f, e)| f + e).collect();
    let dataset = RegressionDataset::new(design, responses)?.with_truth(truth)?;
    match sigma {
        Some(s) => dataset.with_noise_level(s),
        None => Ok(dataset),
    }
}
