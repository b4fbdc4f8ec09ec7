//! Regression data, Gram caches and the loss functions used by the
//! benchmarks.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, check_positive, Error, Result};
use crate::linalg::{self, Matrix};

/// A linear regression sample `Y = X lambda + noise`.
///
/// Row `i` of `design` is the feature vector of observation `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDataset {
    design: Matrix,
    responses: Vec<f64>,
    truth: Option<Vec<f64>>,
    noise_level: Option<f64>,
}

impl RegressionDataset {
    pub fn new(design: Matrix, responses: Vec<f64>) -> Result<Self> {
        if design.rows() == 0 {
            return Err(Error::Empty("design has no rows"));
        }
        if design.cols() == 0 {
            return Err(Error::Empty("design has no columns"));
        }
        check_len("responses", design.rows(), responses.len())?;
        Ok(Self {
            design,
            responses,
            truth: None,
            noise_level: None,
        })
    }

    pub fn with_truth(mut self, truth: Vec<f64>) -> Result<Self> {
        check_len("truth", self.design.cols(), truth.len())?;
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn with_noise_level(mut self, sigma: f64) -> Result<Self> {
        check_positive("noise level", sigma)?;
        self.noise_level = Some(sigma);
        Ok(self)
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn truth(&self) -> Option<&[f64]> {
        self.truth.as_deref()
    }

    pub fn noise_level(&self) -> Option<f64> {
        self.noise_level
    }

    /// Number of observations `n`.
    pub fn n_samples(&self) -> usize {
        self.design.rows()
    }

    /// Dictionary size `M`.
    pub fn n_features(&self) -> usize {
        self.design.cols()
    }

    /// Same design and metadata, different responses.
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<Self> {
        check_len("responses", self.design.rows(), responses.len())?;
        Ok(Self {
            responses,
            ..self.clone()
        })
    }
}

/// Sufficient statistics of the quadratic part of the least-squares
/// objective, computed once per dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCache {
    /// `X^T X`.
    pub xtx: Matrix,
    /// `X^T Y`.
    pub xty: Vec<f64>,
    /// `Tr(X^T X)`.
    pub trace_xtx: f64,
    /// `||Y||_2^2`.
    pub responses_norm_sq: f64,
    pub n_samples: usize,
}

impl GramCache {
    pub fn new(dataset: &RegressionDataset) -> Self {
        let design = dataset.design();
        let xtx = design.gram();
        let xty = design
            .tmatvec(dataset.responses())
            .expect("dataset invariants guarantee matching lengths");
        let trace_xtx = xtx.trace();
        Self {
            xtx,
            xty,
            trace_xtx,
            responses_norm_sq: linalg::norm_sq(dataset.responses()),
            n_samples: dataset.n_samples(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.xty.len()
    }

    /// Gram data for the negated responses `-Y`. Exact: negation commutes
    /// with every floating-point operation used to build the cache.
    pub fn negated_responses(&self) -> Self {
        Self {
            xty: self.xty.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }
}

/// Same as [`GramCache::new`].
pub fn build_gram(dataset: &RegressionDataset) -> GramCache {
    GramCache::new(dataset)
}

/// `(1/n) sum_i v_i^2`, the squared empirical norm.
pub fn empirical_norm_sq(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("empirical norm of an empty vector"));
    }
    Ok(linalg::norm_sq(values) / values.len() as f64)
}

/// Squared Euclidean distance between an estimate and the truth.
pub fn coefficient_loss(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_len("estimate vs truth", truth.len(), estimate.len())?;
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// `delta^T G delta`.
pub fn functional_loss(delta: &[f64], gram: &Matrix) -> Result<f64> {
    check_len("gram rows", delta.len(), gram.rows())?;
    check_len("gram columns", delta.len(), gram.cols())?;
    let g_delta = gram.matvec(delta)?;
    Ok(linalg::dot(delta, &g_delta).max(0.0))
}

/// Gram matrix in `L2([0,1]^2)` of the `k^2` rectangle indicators
/// `phi_{(i-1)k+j} = 1[0, i/k] x [0, j/k]`.
///
/// Entry `(a, b)` is the area of the intersection of the two rectangles,
/// `(min(i,p)/k) * (min(j,q)/k)`. Indices are 0-based here: dictionary
/// element `(i, j)` (1-based) sits at `(i-1)*k + (j-1)`.
pub fn rectangle_gram(k: usize) -> Result<Matrix> {
    if k == 0 {
        return Err(Error::InvalidParameter("rectangle grid size k must be >= 1".into()));
    }
    let m = k * k;
    let kf = k as f64;
    Ok(Matrix::from_fn(m, m, |a, b| {
        let (i, j) = (a / k + 1, a % k + 1);
        let (p, q) = (b / k + 1, b % k + 1);
        (i.min(p) as f64 / kf) * (j.min(q) as f64 / kf)
    }))
}

/// Value of rectangle indicator `index` (0-based) at the point `z` of the
/// unit square.
pub fn rectangle_indicator(k: usize, index: usize, z: [f64; 2]) -> f64 {
    let (i, j) = (index / k + 1, index % k + 1);
    let kf = k as f64;
    // 1[0,i] x [0,j] evaluated at k*z
    if z[0] * kf <= i as f64 && z[1] * kf <= j as f64 && z[0] >= 0.0 && z[1] >= 0.0 {
        1.0
    } else {
        0.0
    }
}
