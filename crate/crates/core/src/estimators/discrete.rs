use crate::error::{check_len, check_positive, Error, Result};
use crate::linalg::Matrix;

/// Exponential weights `w_j ∝ exp(-||Y - f_j||^2 / beta)` of the candidates
/// under the uniform prior. Column `j` of `predictions` holds `f_j(Z_i)`.
pub fn ewa_discrete(predictions: &Matrix, responses: &[f64], beta: f64) -> Result<Vec<f64>> {
    check_positive("beta", beta)?;
    check_len("responses", predictions.rows(), responses.len())?;
    if predictions.cols() == 0 {
        return Err(Error::Empty("no candidates"));
    }
    let mut losses = vec![0.0; predictions.cols()];
    for (row, &y) in predictions.row_iter().zip(responses) {
        for (loss, &f) in losses.iter_mut().zip(row) {
            *loss += (y - f) * (y - f);
        }
    }
    Ok(softmax_neg(&losses, beta))
}

/// `exp(-loss / beta)` normalized, shifted by the smallest loss.
pub(crate) fn softmax_neg(losses: &[f64], beta: f64) -> Vec<f64> {
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = losses.iter().map(|l| (-(l - best) / beta).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// `sum_j w_j f_j`.
pub fn aggregate_prediction(predictions: &Matrix, weights: &[f64]) -> Result<Vec<f64>> {
    predictions.matvec(weights)
}
