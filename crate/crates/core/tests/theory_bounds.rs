mod common;

use common::{gaussian_matrix, gaussian_vector, integrate};
use rand::Rng;
use rand_distr::StandardNormal;
use sparse_ewa::datagen::{gen_example1, Example1Spec};
use sparse_ewa::estimators::{aggregate_prediction, ewa_discrete, ewa_fit, EwaConfig};
use sparse_ewa::estimators::prediction_loss;
use sparse_ewa::linalg::Matrix;
use sparse_ewa::model::{empirical_norm_sq, rectangle_gram, rectangle_indicator};
use sparse_ewa::prior::marginal_density;
use sparse_ewa::rng::{self, derive_seed};
use sparse_ewa::stats::mean_and_se;
use sparse_ewa::theory::{finite_dictionary_rhs, kl_sparsity_bound, soi_rhs, SoiInputs};

#[test]
fn rectangle_gram_matches_monte_carlo_integration() {
    let k = 4;
    let gram = rectangle_gram(k).unwrap();
    let draws = 200_000;
    let mut r = rng::stream(17, 0);
    let points: Vec<[f64; 2]> = (0..draws).map(|_| [r.random::<f64>(), r.random::<f64>()]).collect();
    for a in 0..k * k {
        for b in 0..k * k {
            let hits: Vec<f64> = points
                .iter()
                .map(|&z| rectangle_indicator(k, a, z) * rectangle_indicator(k, b, z))
                .collect();
            let (m, se) = mean_and_se(&hits);
            assert!((m - gram.get(a, b)).abs() <= 4.0 * se.max(1e-3), "entry ({a}, {b})");
        }
    }
}

#[test]
fn discrete_aggregate_obeys_finite_dictionary_bound() {
    let sigma = 1.0;
    let beta = 4.0 * sigma * sigma;
    for dict in 0..20u64 {
        let mut r = rng::stream(500, dict);
        let m = r.random_range(2..=8);
        let n = r.random_range(5..=50);
        let f = gaussian_vector(n, 600 + dict);
        // Candidates scattered around f at different distances.
        let offsets = gaussian_matrix(n, m, 700 + dict);
        let predictions = Matrix::from_fn(n, m, |i, j| f[i] + (0.2 + j as f64 * 0.3) * offsets.get(i, j));
        let candidate_losses: Vec<f64> = (0..m)
            .map(|j| {
                let diff: Vec<f64> = (0..n).map(|i| predictions.get(i, j) - f[i]).collect();
                empirical_norm_sq(&diff).unwrap()
            })
            .collect();
        let rhs = finite_dictionary_rhs(&candidate_losses, beta, n).unwrap();

        let mut noise = rng::stream(800, dict);
        let risks: Vec<f64> = (0..2000)
            .map(|_| {
                let y: Vec<f64> = f.iter().map(|v| v + sigma * noise.sample::<f64, _>(StandardNormal)).collect();
                let w = ewa_discrete(&predictions, &y, beta).unwrap();
                let fhat = aggregate_prediction(&predictions, &w).unwrap();
                let diff: Vec<f64> = fhat.iter().zip(&f).map(|(a, b)| a - b).collect();
                empirical_norm_sq(&diff).unwrap()
            })
            .collect();
        let (risk, se) = mean_and_se(&risks);
        assert!(risk <= rhs + 3.0 * se, "dictionary {dict}: risk {risk} > {rhs} + 3 x {se}");
    }
}

#[test]
fn divergence_bound_dominates_numeric_divergence() {
    // KL(pi(. - l*) || pi) factorizes over coordinates when alpha = 0 and
    // R is infinite; compute each factor by quadrature.
    let tau = 0.2;
    let one_dim_kl = |a: f64| {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let g = |t: f64| {
            let c = t.cos();
            if c == 0.0 {
                return 0.0;
            }
            let u = tau * t.tan();
            let p = marginal_density(u, tau);
            let q = marginal_density(u + a, tau);
            p * (p / q).ln() * tau / (c * c)
        };
        integrate(&g, -half_pi, half_pi, 64, 1e-12)
    };
    for lambda_star in [vec![1.0, 0.0, 0.0], vec![0.5, -3.0], vec![10.0, 0.1, 0.0, -0.2]] {
        let numeric: f64 = lambda_star.iter().map(|&a| one_dim_kl(a)).sum();
        let bound = kl_sparsity_bound(&lambda_star, tau, 0.0).unwrap();
        assert!(numeric >= 0.0 && numeric <= bound, "{numeric} > {bound}");
    }
}

#[test]
fn ewa_risk_below_sparsity_oracle_bound() {
    let (n, m, s) = (40, 40, 3);
    let mut risks = Vec::new();
    let mut rhs = None;
    for rep in 0..10 {
        let ds = gen_example1(&Example1Spec { n, m, s, seed: derive_seed(3, rep) }).unwrap();
        let fit = ewa_fit(&ds, &EwaConfig::default().with_seed(rep)).unwrap();
        assert!(!fit.diverged());
        let truth = ds.truth().unwrap();
        risks.push(prediction_loss(ds.design(), &fit.estimate, truth).unwrap());
        // Trace is n M for every Rademacher design, so the tuning is the same.
        rhs.get_or_insert_with(|| {
            soi_rhs(&SoiInputs {
                lambda_star: truth.to_vec(),
                beta: fit.config.beta,
                tau: fit.config.prior.tau,
                alpha: 0.0,
                n,
                radius: f64::INFINITY,
                bias_term: 0.0,
                link_constant: 1.0,
            })
            .unwrap()
        });
    }
    let (risk, se) = mean_and_se(&risks);
    let rhs = rhs.unwrap();
    assert!(risk <= rhs + 3.0 * se, "risk {risk} > {rhs} + 3 x {se}");
}
