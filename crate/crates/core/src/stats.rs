//! Small statistics toolkit: moments, Kolmogorov-Smirnov tests and binned
//! conditional means. Used by the noise verifiers and the benchmark harness.

use serde::{Deserialize, Serialize};

/// Asymptotic 99% quantile of the Kolmogorov distribution, rounded as usual.
pub const KS_C99: f64 = 1.63;

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with the `n - 1` denominator; `None` below two values.
pub fn sample_variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values);
    Some(values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64)
}

/// Mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let se = sample_variance(values)
        .map(|v| (v / values.len() as f64).sqrt())
        .unwrap_or(f64::NAN);
    (mean(values), se)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical_value: f64,
}

impl KsOutcome {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical_value
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample KS statistic `sup_x |F_a(x) - F_b(x)|` against the 99% critical
/// value `1.63 sqrt((m + n) / (m n))`. Ties are handled exactly.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    ks_two_sample_tol(a, b, 0.0)
}

/// [`ks_two_sample`] treating values within `tol` of the smallest pending
/// value as tied, so that atoms reached through different floating-point
/// paths (e.g. `x + (c - x)` versus `c`) are not split.
pub fn ks_two_sample_tol(a: &[f64], b: &[f64], tol: f64) -> KsOutcome {
    let (a, b) = (sorted(a), sorted(b));
    let (m, n) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < m && j < n {
        let x = a[i].min(b[j]) + tol;
        while i < m && a[i] <= x {
            i += 1;
        }
        while j < n && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / m as f64 - j as f64 / n as f64).abs());
    }
    let (mf, nf) = (m as f64, n as f64);
    KsOutcome {
        statistic: d,
        critical_value: KS_C99 * ((mf + nf) / (mf * nf)).sqrt(),
    }
}

/// One-sample KS statistic against a distribution given by its CDF and the
/// left limit of its CDF (identical for continuous laws).
pub fn ks_one_sample(
    sample: &[f64],
    cdf: impl Fn(f64) -> f64,
    cdf_left: impl Fn(f64) -> f64,
) -> KsOutcome {
    let s = sorted(sample);
    let n = s.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < n {
        let x = s[i];
        let below = i as f64 / nf;
        while i < n && s[i] <= x {
            i += 1;
        }
        let at = i as f64 / nf;
        d = d.max((below - cdf_left(x)).abs()).max((at - cdf(x)).abs());
    }
    KsOutcome {
        statistic: d,
        critical_value: KS_C99 / nf.sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinMean {
    /// Smallest and largest conditioning value in the bin.
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub mean: f64,
    pub standard_error: f64,
}

impl BinMean {
    /// `|mean| <= k * se`.
    pub fn within(&self, k: f64) -> bool {
        self.mean.abs() <= k * self.standard_error
    }
}

/// Means of `response` over `bins` equal-count groups of the sorted
/// `condition` values.
pub fn binned_means(condition: &[f64], response: &[f64], bins: usize) -> Vec<BinMean> {
    let mut pairs: Vec<(f64, f64)> = condition.iter().copied().zip(response.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len();
    let bins = bins.clamp(1, n.max(1));
    (0..bins)
        .filter_map(|b| {
            let chunk = &pairs[b * n / bins..(b + 1) * n / bins];
            if chunk.is_empty() {
                return None;
            }
            let values: Vec<f64> = chunk.iter().map(|p| p.1).collect();
            let (mean, standard_error) = mean_and_se(&values);
            Some(BinMean {
                lower: chunk[0].0,
                upper: chunk[chunk.len() - 1].0,
                count: chunk.len(),
                mean,
                standard_error,
            })
        })
        .collect()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}
