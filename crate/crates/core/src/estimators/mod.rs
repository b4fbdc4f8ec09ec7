//! Estimators: the Langevin-computed EWA with the sparsity prior, EWA over a
//! finite dictionary, coordinate-descent Lasso and the oracle Lasso-Gauss
//! refit used as a benchmark.

mod discrete;
pub(crate) mod ewa;
mod lasso;
mod lasso_gauss;

pub use discrete::{aggregate_prediction, ewa_discrete};
pub use ewa::{ewa_fit, ewa_fit_with_gram, resolve_tuning, EwaConfig, EwaFit, ResolvedEwaConfig};
pub use lasso::{lasso_fit, lasso_objective, soft_threshold, theoretical_reg_level, LassoConfig, LassoFit};
pub use lasso_gauss::{
    lasso_gauss_ideal, lasso_gauss_ideal_with, least_squares_on_support, prediction_loss,
    LassoGaussFit, DEFAULT_GRID_SIZE,
};
