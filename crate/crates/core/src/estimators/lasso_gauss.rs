use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::model::{empirical_norm_sq, GramCache, RegressionDataset};

use super::lasso::{coordinate_descent, LassoConfig};

pub const DEFAULT_GRID_SIZE: usize = 50;

/// Span of the regularization grid, in decades below `r_max`.
const GRID_DECADES: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoGaussFit {
    pub coefficients: Vec<f64>,
    /// Regularization level whose refit won.
    pub reg_level: f64,
    pub support: Vec<usize>,
    pub loss: f64,
    /// `(r, loss)` for every grid point, from `r_max` downwards.
    pub path: Vec<(f64, f64)>,
}

/// In-sample prediction loss `||X (estimate - truth)||_n^2`.
pub fn prediction_loss(design: &Matrix, estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_len("estimate vs truth", truth.len(), estimate.len())?;
    let delta: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| a - b).collect();
    empirical_norm_sq(&design.matvec(&delta)?)
}

/// Minimum-norm least squares restricted to the columns in `support`,
/// embedded back into a length-M vector. An empty support gives zero.
pub fn least_squares_on_support(design: &Matrix, responses: &[f64], support: &[usize]) -> Result<Vec<f64>> {
    check_len("responses", design.rows(), responses.len())?;
    let mut full = vec![0.0; design.cols()];
    if support.is_empty() {
        return Ok(full);
    }
    let sub = design.select_columns(support)?;
    let a = DMatrix::from_row_slice(sub.rows(), sub.cols(), sub.as_slice());
    let b = DVector::from_column_slice(responses);
    let svd = a.svd(true, true);
    let largest = svd.singular_values.max();
    let eps = largest * f64::EPSILON * sub.rows().max(sub.cols()) as f64;
    let solution = svd
        .solve(&b, eps)
        .map_err(|e| Error::InvalidParameter(format!("least squares failed: {e}")))?;
    for (&j, v) in support.iter().zip(solution.iter()) {
        full[j] = *v;
    }
    Ok(full)
}

/// Oracle Lasso-Gauss with the in-sample prediction loss against the truth.
pub fn lasso_gauss_ideal(dataset: &RegressionDataset, grid_size: usize) -> Result<LassoGaussFit> {
    let truth = dataset.truth().ok_or(Error::MissingTruth("ideal Lasso-Gauss"))?.to_vec();
    let design = dataset.design().clone();
    lasso_gauss_ideal_with(dataset, grid_size, |estimate| {
        prediction_loss(&design, estimate, &truth)
    })
}

/// Oracle Lasso-Gauss under a caller-supplied loss. Walks a log-spaced grid of
/// `grid_size` levels from `r_max = ||X^T Y||_inf / n` down four decades, with
/// warm starts, refits each selected support by least squares and keeps the
/// refit of smallest loss. Ties go to the larger level.
pub fn lasso_gauss_ideal_with<L>(dataset: &RegressionDataset, grid_size: usize, mut loss: L) -> Result<LassoGaussFit>
where
    L: FnMut(&[f64]) -> Result<f64>,
{
    if grid_size == 0 {
        return Err(Error::InvalidParameter("grid_size must be >= 1".into()));
    }
    let gram = GramCache::new(dataset);
    let n = gram.n_samples as f64;
    let r_max = gram.xty.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / n;
    let config = LassoConfig::default();
    let mut start = vec![0.0; gram.n_features()];
    let mut best: Option<LassoGaussFit> = None;
    let mut path = Vec::with_capacity(grid_size);

    for i in 0..grid_size {
        let exponent = if grid_size == 1 { 0.0 } else { -GRID_DECADES * i as f64 / (grid_size - 1) as f64 };
        let r = r_max * 10f64.powf(exponent);
        let fit = coordinate_descent(&gram, r, start, &config);
        let support: Vec<usize> = (0..fit.coefficients.len())
            .filter(|&j| fit.coefficients[j] != 0.0)
            .collect();
        let refit = least_squares_on_support(dataset.design(), dataset.responses(), &support)?;
        let value = loss(&refit)?;
        path.push((r, value));
        if best.as_ref().is_none_or(|b| value < b.loss) {
            best = Some(LassoGaussFit {
                coefficients: refit,
                reg_level: r,
                support,
                loss: value,
                path: Vec::new(),
            });
        }
        start = fit.coefficients;
    }
    let mut best = best.expect("grid is non-empty");
    best.path = path;
    Ok(best)
}
