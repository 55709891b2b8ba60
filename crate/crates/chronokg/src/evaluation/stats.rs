//! Statistics for the evaluation harness: percentile bootstrap intervals,
//! the exact McNemar test, and the paired t-test.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Percentile bootstrap confidence interval of the mean.
///
/// Resamples with replacement `resamples` times under a ChaCha stream
/// seeded with `seed`; interval bounds are the nearest-rank quantiles of
/// the resampled means, so the same inputs always return the same
/// interval.
pub fn bootstrap_ci(outcomes: &[f64], resamples: usize, seed: u64, level: f64) -> Result<(f64, f64)> {
    if outcomes.is_empty() {
        return Err(Error::domain("bootstrap needs at least one outcome"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::domain("confidence level must be in (0, 1)"));
    }
    let n = outcomes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += outcomes[rng.random_range(0..n)];
        }
        means.push(sum / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - level) / 2.0;
    let lo_idx = nearest_rank(alpha, resamples);
    let hi_idx = nearest_rank(1.0 - alpha, resamples);
    Ok((means[lo_idx], means[hi_idx]))
}

fn nearest_rank(q: f64, n: usize) -> usize {
    let rank = (q * n as f64).ceil() as usize;
    rank.clamp(1, n) - 1
}

/// Two-sided exact McNemar test on paired correctness vectors.
///
/// With `x` pairs correct only under `a` and `y` only under `b`, the
/// p-value is the exact two-sided binomial probability of the observed
/// split under p = 0.5: `2 * min(CDF(x), 1 - CDF(x) + pmf(x))` clamped to
/// 1. Zero discordant pairs give p = 1.
pub fn mcnemar_exact(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain("paired vectors must have equal length"));
    }
    let x = a.iter().zip(b).filter(|(pa, pb)| **pa && !**pb).count();
    let y = a.iter().zip(b).filter(|(pa, pb)| !**pa && **pb).count();
    Ok(mcnemar_from_discordants(x, y))
}

/// Exact test from the discordant counts directly.
///
/// Under p = 1/2 the upper branch `1 - CDF(x) + pmf(x)` equals
/// `CDF(n - x)`, so the two-sided p-value reduces to `2 * CDF(min(x, y))`
/// — symmetric in the arguments by construction. The pmf is evaluated in
/// log space so large discordant counts cannot underflow.
pub fn mcnemar_from_discordants(x: usize, y: usize) -> f64 {
    let n = x + y;
    if n == 0 {
        return 1.0;
    }
    let ln2 = std::f64::consts::LN_2;
    let pmf = |i: usize| -> f64 {
        (ln_gamma(n as f64 + 1.0)
            - ln_gamma(i as f64 + 1.0)
            - ln_gamma((n - i) as f64 + 1.0)
            - n as f64 * ln2)
            .exp()
    };
    let k = x.min(y);
    let lower_tail: f64 = (0..=k).map(pmf).sum();
    (2.0 * lower_tail).min(1.0)
}

/// Two-sided paired t-test p-value with n-1 degrees of freedom.
///
/// Zero variance of the differences degenerates: p = 0 when any
/// difference is nonzero, else 1.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain("paired vectors must have equal length"));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::domain("paired t-test needs n >= 2"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok(if mean != 0.0 { 0.0 } else { 1.0 });
    }
    let t = mean / (var.sqrt() / (n as f64).sqrt());
    let df = (n - 1) as f64;
    Ok(two_sided_t_pvalue(t, df))
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom, via the
/// regularized incomplete beta function.
pub fn two_sided_t_pvalue(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    incomplete_beta_regularized(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// ln Γ(x), Lanczos approximation.
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for c in COEFFS {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
fn incomplete_beta_regularized(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 3e-16;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reimplementation of the bootstrap under the same
    /// resampling convention, written against the documented contract.
    fn bootstrap_oracle(outcomes: &[f64], resamples: usize, seed: u64, level: f64) -> (f64, f64) {
        let n = outcomes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut means: Vec<f64> = (0..resamples)
            .map(|_| {
                (0..n).map(|_| outcomes[rng.random_range(0..n)]).sum::<f64>() / n as f64
            })
            .collect();
        means.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let alpha = (1.0 - level) / 2.0;
        let lo = ((alpha * resamples as f64).ceil() as usize).clamp(1, resamples) - 1;
        let hi = (((1.0 - alpha) * resamples as f64).ceil() as usize).clamp(1, resamples) - 1;
        (means[lo], means[hi])
    }

    /// Numeric t-CDF oracle: integrate the unnormalized density with the
    /// tangent substitution x = tan(theta), Simpson's rule, then form the
    /// two-sided tail ratio. Independent of the incomplete-beta route.
    fn t_pvalue_oracle(t: f64, df: f64) -> f64 {
        let pdf = |x: f64| (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
        let integrand = |theta: f64| {
            let x = theta.tan();
            let sec2 = 1.0 / theta.cos().powi(2);
            pdf(x) * sec2
        };
        let simpson = |lo: f64, hi: f64, steps: usize| {
            let h = (hi - lo) / steps as f64;
            let mut sum = integrand(lo) + integrand(hi);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * integrand(lo + i as f64 * h);
            }
            sum * h / 3.0
        };
        let eps = 1e-9;
        let total = simpson(-std::f64::consts::FRAC_PI_2 + eps, std::f64::consts::FRAC_PI_2 - eps, 200_000);
        let tail = simpson(t.abs().atan(), std::f64::consts::FRAC_PI_2 - eps, 200_000);
        2.0 * tail / total
    }

    #[test]
    fn bootstrap_point_mass_is_degenerate() {
        let (lo, hi) = bootstrap_ci(&[1.0; 12], 1000, 42, 0.95).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        let (lo, hi) = bootstrap_ci(&[0.7], 1000, 42, 0.95).unwrap();
        assert_eq!((lo, hi), (0.7, 0.7));
    }

    #[test]
    fn bootstrap_matches_independent_reimplementation() {
        let fixtures: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
            vec![0.2, 0.4, 0.6, 0.8],
            vec![5.0, 5.0, 7.0],
            (0..15).map(|i| i as f64 / 14.0).collect(),
            vec![0.0, 1.0],
        ];
        for (i, outcomes) in fixtures.iter().enumerate() {
            let got = bootstrap_ci(outcomes, 2000, 42, 0.95).unwrap();
            let want = bootstrap_oracle(outcomes, 2000, 42, 0.95);
            assert_eq!(got, want, "fixture {i}");
        }
    }

    #[test]
    fn bootstrap_endpoints_within_attainable_means() {
        let outcomes = vec![0.0, 0.0, 1.0, 1.0, 1.0];
        let (lo, hi) = bootstrap_ci(&outcomes, 5000, 42, 0.95).unwrap();
        assert!((0.0..=1.0).contains(&lo));
        assert!((0.0..=1.0).contains(&hi));
        assert!(lo <= hi);
    }

    #[test]
    fn mcnemar_ten_zero_matches_exact_arithmetic() {
        // 2 * 0.5^10 = 0.001953125
        let p = mcnemar_from_discordants(10, 0);
        assert!((p - 0.001953125).abs() < 1e-9);
    }

    #[test]
    fn mcnemar_symmetric_split_is_one() {
        assert_eq!(mcnemar_from_discordants(5, 5), 1.0);
        assert_eq!(mcnemar_from_discordants(0, 0), 1.0);
    }

    #[test]
    fn mcnemar_symmetric_in_arguments() {
        for (x, y) in [(3, 9), (0, 4), (7, 2)] {
            assert!((mcnemar_from_discordants(x, y) - mcnemar_from_discordants(y, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn mcnemar_stays_sane_for_large_counts() {
        // The symmetric split is exactly 1 even when 0.5^n underflows.
        assert_eq!(mcnemar_from_discordants(800, 800), 1.0);
        // Strongly one-sided large splits are significant, not NaN.
        let p = mcnemar_from_discordants(700, 500);
        assert!(p > 0.0 && p < 1e-6, "p = {p}");
    }

    #[test]
    fn mcnemar_from_vectors() {
        let a = vec![true, true, true, false, true];
        let b = vec![false, false, true, false, true];
        // x = 2, y = 0 -> 2 * 0.25 = 0.5
        assert!((mcnemar_exact(&a, &b).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn paired_t_identical_vectors_p_is_one() {
        let p = paired_t(&[0.1, 0.2, 0.3], &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn paired_t_rejects_single_sample() {
        assert!(paired_t(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn paired_t_matches_numeric_cdf_oracle() {
        // Three-seed style fixtures.
        let cases = [
            (vec![0.0192, 0.0185, 0.0199], vec![0.0101, 0.0099, 0.0105]),
            (vec![0.5, 0.6, 0.4], vec![0.45, 0.58, 0.42]),
            (vec![1.0, 2.0, 3.0, 4.0], vec![1.1, 2.2, 2.4, 4.4]),
        ];
        for (a, b) in cases {
            let n = a.len();
            let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            let mean = diffs.iter().sum::<f64>() / n as f64;
            let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let t = mean / (var.sqrt() / (n as f64).sqrt());
            let want = t_pvalue_oracle(t, (n - 1) as f64);
            let got = paired_t(&a, &b).unwrap();
            assert!((got - want).abs() < 1e-6, "got {got}, oracle {want}");
        }
    }

    #[test]
    fn t_pvalue_sanity_against_known_values() {
        // t = 4.303 at df = 2 is the 95% critical value.
        let p = two_sided_t_pvalue(4.303, 2.0);
        assert!((p - 0.05).abs() < 1e-3, "p = {p}");
        // t = 2.776 at df = 4.
        let p = two_sided_t_pvalue(2.776, 4.0);
        assert!((p - 0.05).abs() < 1e-3, "p = {p}");
    }
}
