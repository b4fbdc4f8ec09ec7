//! Log-density of the EWA pseudo-posterior for the identity link:
//!
//! ```text
//! V(l) = -||Y - X l||^2 / beta + log prior(l)
//! ```
//!
//! The quadratic part is expanded through the Gram cache so a gradient costs
//! one `M x M` matrix-vector product.

use std::sync::Arc;

use crate::error::{check_len, check_positive, Result};
use crate::linalg::{self, symmetric_matvec_into};
use crate::model::GramCache;
use crate::prior::{self, PriorParams};

#[derive(Debug, Clone)]
pub struct Potential {
    gram: Arc<GramCache>,
    beta: f64,
    prior: PriorParams,
    /// False for the pure quadratic potential used to check the sampler.
    prior_enabled: bool,
}

impl Potential {
    pub fn new(gram: Arc<GramCache>, beta: f64, prior: PriorParams) -> Result<Self> {
        check_positive("beta", beta)?;
        prior.validate()?;
        Ok(Self { gram, beta, prior, prior_enabled: true })
    }

    /// `V(lambda) = -||Y - X lambda||^2 / beta` alone. Its density is Gaussian
    /// around the least-squares solution when `X^T X` is invertible.
    pub fn quadratic(gram: Arc<GramCache>, beta: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        let prior = PriorParams::student(1.0)?;
        Ok(Self { gram, beta, prior, prior_enabled: false })
    }

    pub fn has_prior(&self) -> bool {
        self.prior_enabled
    }

    pub fn gram(&self) -> &GramCache {
        &self.gram
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn prior(&self) -> &PriorParams {
        &self.prior
    }

    pub fn dim(&self) -> usize {
        self.gram.n_features()
    }

    /// `V(lambda)`; `-inf` outside the prior support.
    pub fn value(&self, lambda: &[f64]) -> Result<f64> {
        check_len("lambda", self.dim(), lambda.len())?;
        let g = &self.gram;
        let mut xtx_l = vec![0.0; lambda.len()];
        symmetric_matvec_into(&g.xtx, lambda, &mut xtx_l);
        let residual_sq = g.responses_norm_sq - 2.0 * linalg::dot(lambda, &g.xty)
            + linalg::dot(lambda, &xtx_l);
        let log_prior = if self.prior_enabled { prior::log_prior_unnorm(lambda, &self.prior) } else { 0.0 };
        Ok(-residual_sq / self.beta + log_prior)
    }

    /// `grad V(lambda) = (2/beta)(X^T Y - X^T X lambda) + grad log prior(lambda)`.
    pub fn gradient(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        check_len("lambda", self.dim(), lambda.len())?;
        let mut out = vec![0.0; lambda.len()];
        self.gradient_into(lambda, &mut out);
        Ok(out)
    }

    /// Allocation-free gradient. Lengths must already match.
    #[inline]
    pub fn gradient_into(&self, lambda: &[f64], out: &mut [f64]) {
        symmetric_matvec_into(&self.gram.xtx, lambda, out);
        let scale = 2.0 / self.beta;
        for (o, &xy) in out.iter_mut().zip(&self.gram.xty) {
            *o = scale * (xy - *o);
        }
        if self.prior_enabled {
            prior::add_grad_log_prior(lambda, &self.prior, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::model::RegressionDataset;

    fn identity_potential(y: Vec<f64>, beta: f64) -> Potential {
        let m = y.len();
        let ds = RegressionDataset::new(Matrix::identity(m), y).unwrap();
        Potential::new(
            Arc::new(GramCache::new(&ds)),
            beta,
            PriorParams::student(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn value_at_zero() {
        let p = identity_potential(vec![1.0, -2.0], 4.0);
        assert_eq!(p.value(&[0.0, 0.0]).unwrap(), -5.0 / 4.0);
    }

    #[test]
    fn value_identity_design() {
        let beta = 3.0;
        let p = identity_potential(vec![0.0], beta);
        let expected = -1.0 / beta - 2.0 * 2f64.ln();
        assert!((p.value(&[1.0]).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn gradient_examples() {
        let p = identity_potential(vec![0.0, 0.0], 4.0);
        assert_eq!(p.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let p = identity_potential(vec![3.0], 4.0);
        assert_eq!(p.gradient(&[0.0]).unwrap(), vec![1.5]);
    }

    #[test]
    fn quadratic_potential_skips_prior() {
        let ds = RegressionDataset::new(Matrix::identity(2), vec![1.0, -2.0]).unwrap();
        let p = Potential::quadratic(Arc::new(GramCache::new(&ds)), 2.0).unwrap();
        assert_eq!(p.value(&[1.0, -2.0]).unwrap(), 0.0);
        assert_eq!(p.gradient(&[0.0, 0.0]).unwrap(), vec![1.0, -2.0]);
        assert!(!p.has_prior());
    }

    #[test]
    fn dimension_checks() {
        let p = identity_potential(vec![0.0, 0.0], 4.0);
        assert!(p.value(&[0.0]).is_err());
        assert!(p.gradient(&[0.0; 3]).is_err());
        let gram = Arc::new(p.gram().clone());
        assert!(Potential::new(gram, 0.0, PriorParams::student(1.0).unwrap()).is_err());
    }

    #[test]
    fn value_diverges_along_rays() {
        let p = identity_potential(vec![0.3, -0.1], 2.0);
        let dir = [0.6, -0.8];
        let mut last = f64::INFINITY;
        for scale in [1e1, 1e2, 1e3, 1e4] {
            let v = p.value(&[dir[0] * scale, dir[1] * scale]).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < -1e6);
    }
}
