mod common;

use std::sync::Arc;

use common::{gaussian_matrix, gaussian_vector, integrate, solve, symmetric_eigen_range};
use sparse_ewa::linalg::Matrix;
use sparse_ewa::model::{GramCache, RegressionDataset};
use sparse_ewa::potential::Potential;
use sparse_ewa::prior::PriorParams;
use sparse_ewa::sampler::{run_with_restarts, run_with_restarts_from, Negated, SamplerConfig, SeededGaussian};

const TAU: f64 = 0.1;
const BETA: f64 = 4.0;

/// Enough data that the posterior has a single mode near the signal; with
/// few observations the prior spike at zero competes with it and the chain
/// switches modes too rarely for batch means to estimate its error.
fn one_dim_instance() -> RegressionDataset {
    let n = 50;
    let x = gaussian_matrix(n, 1, 11);
    let noise = gaussian_vector(n, 12);
    let y: Vec<f64> = (0..n).map(|i| x.get(i, 0) + 0.5 * noise[i]).collect();
    RegressionDataset::new(x, y).unwrap()
}

/// Posterior mean of `exp(V)` by quadrature, with `V` written out directly
/// from the data rather than through the Gram cache.
fn quadrature_posterior_mean(ds: &RegressionDataset) -> f64 {
    let v = |l: f64| -> f64 {
        let rss: f64 = (0..ds.n_samples())
            .map(|i| (ds.responses()[i] - ds.design().get(i, 0) * l).powi(2))
            .sum();
        -rss / BETA - 2.0 * (TAU * TAU + l * l).ln()
    };
    let shift = (-5000..=5000).map(|i| v(i as f64 * 0.01)).fold(f64::NEG_INFINITY, f64::max);
    let density = |l: f64| (v(l) - shift).exp();
    let z = integrate(&density, -50.0, 50.0, 400, 1e-10);
    let first = integrate(&|l| l * density(l), -50.0, 50.0, 400, 1e-10);
    first / z
}

fn one_dim_potential(ds: &RegressionDataset) -> Potential {
    Potential::new(Arc::new(GramCache::new(ds)), BETA, PriorParams::student(TAU).unwrap()).unwrap()
}

#[test]
fn one_dimensional_chain_matches_quadrature() {
    let ds = one_dim_instance();
    let target = quadrature_posterior_mean(&ds);
    let potential = one_dim_potential(&ds);
    let mut passes = 0;
    for seed in 0..20 {
        let config = SamplerConfig::new(1e-3, 1e4, seed).unwrap();
        let report = run_with_restarts(&potential, &config);
        let se = report.standard_errors().unwrap()[0];
        let z = (report.average[0] - target) / se;
        if z.abs() <= 3.0 {
            passes += 1;
        }
        eprintln!("seed {seed}: mean {:.5} target {target:.5} se {se:.2e} z {z:+.2}", report.average[0]);
    }
    assert!(passes >= 19, "{passes}/20 seeds within 3 SE");
}

/// Random 5 x 5 Gaussian designs, skipping draws whose Gram matrix has
/// condition number above 100: the slowest mode relaxes on a time scale
/// proportional to the conditioning, and the horizon here is a fixed multiple
/// of it.
fn conditioned_designs(count: usize) -> Vec<(Matrix, f64, f64)> {
    let mut out = Vec::new();
    let mut seed = 1000;
    while out.len() < count {
        let x = gaussian_matrix(5, 5, seed);
        let (lo, hi) = symmetric_eigen_range(&x.gram());
        if hi / lo <= 100.0 {
            out.push((x, lo, hi));
        }
        seed += 1;
    }
    out
}

#[test]
fn quadratic_chain_mean_is_least_squares() {
    for (instance, (x, lo, hi)) in conditioned_designs(5).into_iter().enumerate() {
        let y = gaussian_vector(5, 2000 + instance as u64);
        let ds = RegressionDataset::new(x, y).unwrap();
        let gram = Arc::new(GramCache::new(&ds));
        let ols = solve(&gram.xtx, &gram.xty);
        // With beta = 2 the curvature matrix (2 / beta) X^T X is X^T X itself.
        let beta = 2.0;
        let step = 0.5 / hi;
        let horizon = 2e3 / lo;
        let potential = Potential::quadratic(gram, beta).unwrap();
        let config = SamplerConfig::new(step, horizon, 77 + instance as u64).unwrap();
        let report = run_with_restarts(&potential, &config);
        assert_eq!(report.restarts_used, 0);
        let se = report.standard_errors().unwrap();
        for j in 0..5 {
            let z = (report.average[j] - ols[j]) / se[j];
            assert!(z.abs() <= 3.0, "instance {instance}, coord {j}: z = {z:.2}");
        }
    }
}

#[test]
fn diagonal_quadratic_example() {
    // X = sqrt(n) I with n = M = 2.
    let x = Matrix::from_rows(&[vec![2f64.sqrt(), 0.0], vec![0.0, 2f64.sqrt()]]).unwrap();
    let ds = RegressionDataset::new(x, vec![1.0, -0.5]).unwrap();
    let potential = Potential::quadratic(Arc::new(GramCache::new(&ds)), 4.0).unwrap();
    let report = run_with_restarts(&potential, &SamplerConfig::new(0.01, 1e3, 5).unwrap());
    let se = report.standard_errors().unwrap();
    let expected = [1.0 / 2f64.sqrt(), -0.5 / 2f64.sqrt()];
    for j in 0..2 {
        assert!((report.average[j] - expected[j]).abs() <= 3.0 * se[j]);
    }
}

#[test]
fn symmetric_posterior_centres_on_zero() {
    let ds = RegressionDataset::new(Matrix::identity(1), vec![0.0]).unwrap();
    let potential = one_dim_potential(&ds);
    let report = run_with_restarts(&potential, &SamplerConfig::new(1e-3, 1e3, 9).unwrap());
    let se = report.standard_errors().unwrap()[0];
    assert!(report.average[0].abs() <= 3.0 * se);
}

#[test]
fn negating_responses_and_noise_negates_the_chain() {
    let ds = one_dim_instance();
    let x = gaussian_matrix(8, 3, 5);
    let ds3 = RegressionDataset::new(x, gaussian_vector(8, 6)).unwrap();
    for ds in [ds, ds3] {
        let gram = Arc::new(GramCache::new(&ds));
        let prior = PriorParams::new(0.3, 0.2, f64::INFINITY).unwrap();
        let plus = Potential::new(gram.clone(), BETA, prior).unwrap();
        let minus = Potential::new(Arc::new(gram.negated_responses()), BETA, prior).unwrap();
        let config = SamplerConfig::new(1e-2, 50.0, 3).unwrap();
        let a = run_with_restarts_from(&plus, &config, |r| SeededGaussian::new(3, r as u64));
        let b = run_with_restarts_from(&minus, &config, |r| Negated(SeededGaussian::new(3, r as u64)));
        let negated: Vec<f64> = a.average.iter().map(|v| -v).collect();
        assert_eq!(b.average, negated);
    }
}

#[test]
fn unstable_step_restarts_and_shrinks() {
    let ds = one_dim_instance();
    let gram = Arc::new(GramCache::new(&ds));
    let norm = gram.xtx.spectral_norm_psd();
    let potential = one_dim_potential(&ds);
    let step = 1e6 / norm;
    let config = SamplerConfig::new(step, 1e4 * step, 1).unwrap();
    let report = run_with_restarts(&potential, &config);
    assert!(report.restarts_used >= 1);
    assert!(report.final_step < step);

    let report = run_with_restarts(&potential, &config.with_max_restarts(0));
    assert!(report.diverged);
    assert!(report.average.iter().all(|&v| v == 0.0));
}

#[test]
fn identical_configs_give_identical_reports() {
    let ds = one_dim_instance();
    let potential = one_dim_potential(&ds);
    let config = SamplerConfig::new(1e-3, 20.0, 42).unwrap().with_trace_every(100);
    assert_eq!(run_with_restarts(&potential, &config), run_with_restarts(&potential, &config));
}
