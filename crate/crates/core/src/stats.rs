//! Kolmogorov-Smirnov tests and binomial acceptance regions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

const KOLMOGOROV_TERMS: usize = 100;
const KOLMOGOROV_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
///
/// Uses the alternating series `2 sum (-1)^(k-1) exp(-2 k^2 x^2)` for `x >= 1`
/// and the theta-function form of the CDF below that, where the alternating
/// series converges slowly.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    let p = if x < 1.0 {
        let mut sum = 0.0;
        for k in 1..=KOLMOGOROV_TERMS {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * PI * PI / (8.0 * x * x)).exp();
            sum += term;
            if term < KOLMOGOROV_TOL * sum {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / x * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=KOLMOGOROV_TERMS {
            let k = k as f64;
            let term = (-2.0 * k * k * x * x).exp();
            sum += sign * term;
            if term < KOLMOGOROV_TOL * sum.abs() {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// One-sample KS test of `sample` against a continuous `cdf`, with the
/// asymptotic p-value.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> KsOutcome {
    let mut u: Vec<f64> = sample.iter().map(|&x| cdf(x)).collect();
    u.sort_unstable_by(f64::total_cmp);
    let n = u.len() as f64;
    let statistic = u
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let i = i as f64;
            ((i + 1.0) / n - v).max(v - i / n)
        })
        .fold(0.0, f64::max);
    KsOutcome {
        statistic,
        p_value: kolmogorov_sf(n.sqrt() * statistic),
    }
}

/// Two-sample KS test with the asymptotic p-value. Ties are handled by
/// stepping both empirical CDFs past a shared value together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut statistic: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n - j as f64 / m).abs());
    }
    let effective = (n * m / (n + m)).sqrt();
    KsOutcome {
        statistic,
        p_value: kolmogorov_sf(effective * statistic),
    }
}

/// Equal-tailed acceptance region `[lo, hi]` for `X ~ Binomial(n, p)`: the
/// widest `lo` and narrowest `hi` with `P(X < lo) <= a/2` and
/// `P(X > hi) <= a/2`, where `a = 1 - confidence`.
pub fn binomial_acceptance_region(n: u64, p: f64, confidence: f64) -> (u64, u64) {
    let tail = (1.0 - confidence) / 2.0;
    let pmf = binomial_pmf(n, p);
    let mut lo = 0;
    let mut below = 0.0;
    while lo < n && below + pmf[lo as usize] <= tail {
        below += pmf[lo as usize];
        lo += 1;
    }
    let mut hi = n;
    let mut above = 0.0;
    while hi > 0 && above + pmf[hi as usize] <= tail {
        above += pmf[hi as usize];
        hi -= 1;
    }
    (lo, hi)
}

fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut log_choose = 0.0;
    (0..=n)
        .map(|k| {
            if k > 0 {
                log_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            (log_choose + k as f64 * lp + (n - k) as f64 * lq).exp()
        })
        .collect()
}
