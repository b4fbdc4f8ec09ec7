use proptest::prelude::*;
use sparse_ewa::noise::{
    couple_bounded_symmetric, couple_rademacher, laplace_zeta_cf, sample_couplings, verify_coupling,
    BoundedBase, NoiseModel,
};
use sparse_ewa::rng;
use sparse_ewa::stats::{binned_means, ks_two_sample};

const GAMMAS: [f64; 3] = [0.05, 0.1, 0.2];

fn families() -> Vec<NoiseModel> {
    vec![
        NoiseModel::Gaussian { sigma: 1.0 },
        NoiseModel::Rademacher { sigma: 1.0 },
        NoiseModel::Laplace { sigma: 1.0 },
        NoiseModel::BoundedSymmetric { bound: 1.0, base: BoundedBase::Uniform },
    ]
}

/// The distributional clauses must hold in every configuration. The
/// conditional-mean clause is checked in aggregate: 12 configurations of 20
/// bins are 240 simultaneous 3-SE comparisons, so about 0.65 misses are
/// expected from a correct coupling. Instead the squared z-scores must be
/// consistent with chi-square(240) and at most 4 bins may miss.
#[test]
fn every_family_passes_every_clause() {
    let mut z_sq = 0.0;
    let mut misses = 0;
    let mut bins = 0;
    for model in families() {
        for (i, &gamma) in GAMMAS.iter().enumerate() {
            let v = verify_coupling(&model, gamma, 100_000, 40 + i as u64).unwrap();
            assert!(v.marginal_ok(), "{} gamma {gamma}: marginal {:?}", v.family, v.marginal);
            assert!(v.sum_law_ok(), "{} gamma {gamma}: sum law {:?}", v.family, v.sum_law);
            for b in &v.conditional_mean {
                z_sq += (b.mean / b.standard_error).powi(2);
                misses += usize::from(!b.within(3.0));
                bins += 1;
            }
        }
    }
    assert_eq!(bins, 240);
    // 99.9% quantile of chi-square(240), Wilson-Hilferty.
    let k = 240.0f64;
    let q = k * (1.0 - 2.0 / (9.0 * k) + 3.090 * (2.0 / (9.0 * k)).sqrt()).powi(3);
    assert!(z_sq < q, "sum of squared z-scores {z_sq:.1} exceeds {q:.1}");
    assert!(misses <= 4, "{misses} bins outside 3 SE");
}

#[test]
fn other_bounded_bases_pass() {
    for base in [BoundedBase::Rademacher, BoundedBase::Triangular] {
        let model = NoiseModel::BoundedSymmetric { bound: 2.0, base };
        assert!(verify_coupling(&model, 0.1, 50_000, 3).unwrap().all_ok(), "{base:?}");
    }
}

#[test]
fn checks_have_power_against_a_wrong_coupling() {
    // zeta = gamma xi has the right sum law but E[zeta | xi] = gamma xi.
    let gamma = 0.1;
    let model = NoiseModel::Gaussian { sigma: 1.0 };
    let xi = model.sample(100_000, 1);
    let zeta: Vec<f64> = xi.iter().map(|x| gamma * x).collect();
    let bins = binned_means(&xi, &zeta, 20);
    assert!(bins.iter().any(|b| !b.within(3.0)));

    // zeta independent Gaussian with the wrong variance breaks the sum law.
    let mut r = rng::stream(2, 0);
    let wrong: Vec<f64> = xi.iter().map(|&x| x + 0.1 * model.draw(&mut r)).collect();
    let scaled: Vec<f64> = model.sample(100_000, 3).iter().map(|x| (1.0 + gamma) * x).collect();
    assert!(!ks_two_sample(&wrong, &scaled).passes());
}

#[test]
fn laplace_characteristic_functions_factor() {
    // cf of Laplace with variance s^2 is 1 / (1 + s^2 t^2 / 2).
    let cf = |t: f64, s: f64| 1.0 / (1.0 + s * s * t * t / 2.0);
    for &gamma in &GAMMAS {
        for i in 0..50 {
            let t = -5.0 + 0.2 * i as f64;
            let lhs = cf(t, 1.0) * laplace_zeta_cf(t, gamma, 1.0);
            let rhs = cf((1.0 + gamma) * t, 1.0);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }
}

#[test]
fn laplace_zeta_empirical_cf() {
    let gamma = 0.2;
    let pairs = sample_couplings(&NoiseModel::Laplace { sigma: 1.0 }, gamma, 200_000, 9).unwrap();
    for &t in &[0.3, 1.0, 2.5] {
        let empirical: f64 = pairs.iter().map(|p| (t * p.zeta).cos()).sum::<f64>() / pairs.len() as f64;
        // Cosines are bounded by 1, so 5 / sqrt(N) is a generous error bar.
        assert!((empirical - laplace_zeta_cf(t, gamma, 1.0)).abs() < 5.0 / (pairs.len() as f64).sqrt());
    }
}

#[test]
fn gaussian_zeta_variance() {
    let gamma = 0.1;
    let pairs = sample_couplings(&NoiseModel::Gaussian { sigma: 2.0 }, gamma, 200_000, 4).unwrap();
    let var: f64 = pairs.iter().map(|p| p.zeta * p.zeta).sum::<f64>() / pairs.len() as f64;
    let expected = (2.0 * gamma + gamma * gamma) * 4.0;
    assert!((var / expected - 1.0).abs() < 0.02);
}

#[test]
fn rademacher_rejects_values_off_the_support() {
    let mut r = rng::stream(0, 0);
    assert!(couple_rademacher(0.5, 0.1, 1.0, &mut r).is_err());
}

proptest! {
    #[test]
    fn rademacher_sum_is_scaled_sign(seed in 0u64..1000, gamma in 0.01f64..1.0, sigma in 0.1f64..5.0, positive: bool) {
        let mut r = rng::stream(seed, 0);
        let xi = if positive { sigma } else { -sigma };
        let c = couple_rademacher(xi, gamma, sigma, &mut r).unwrap();
        prop_assert!(((c.xi + c.zeta).abs() - (1.0 + gamma) * sigma).abs() < 1e-12);
    }

    #[test]
    fn bounded_sum_keeps_the_scaled_modulus(seed in 0u64..1000, gamma in 0.01f64..1.0, xi in -3.0f64..3.0) {
        let mut r = rng::stream(seed, 0);
        let c = couple_bounded_symmetric(xi, gamma, &mut r).unwrap();
        prop_assert!(((c.xi + c.zeta).abs() - (1.0 + gamma) * xi.abs()).abs() < 1e-12);
    }
}
