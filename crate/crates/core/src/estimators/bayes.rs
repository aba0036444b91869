//! Bayesian accuracy estimates from the majority proportion, under a uniform
//! prior for `p` on `(1/2, 1)`.
//!
//! Everything is indexed by the minority count `j = min(B, K - B)`, which
//! ranges over `0..=K/2`. The posterior is
//! `p^j (1-p)^(K-j) + (1-p)^j p^(K-j)`, or the single term `p^j (1-p)^j`
//! when `2j = K`. All evaluation happens in log space so that batches of
//! several thousand responses stay finite.

use std::collections::HashMap;

use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::factorial::ln_binomial;

use crate::error::{GpbaError, Result};
use crate::numeric::{count_log, integrate, log_add_exp};

fn check(j: u32, k: u32) -> Result<()> {
    if k == 0 || 2 * j > k {
        Err(GpbaError::InvalidCount { j, k })
    } else {
        Ok(())
    }
}

fn log_pdf(p: f64, j: u32, k: u32) -> f64 {
    let q = 1.0 - p;
    let same = count_log(j, p) + count_log(k - j, q);
    if 2 * j == k {
        return same;
    }
    log_add_exp(same, count_log(k - j, p) + count_log(j, q))
}

/// Probability that a batch of `k` responses with accuracy `p` has minority
/// count `j`.
pub fn majority_likelihood(j: u32, k: u32, p: f64) -> Result<f64> {
    check(j, k)?;
    if !(0.5..=1.0).contains(&p) {
        return Err(GpbaError::InvalidAccuracy(p));
    }
    Ok((ln_binomial(u64::from(k), u64::from(j)) + log_pdf(p, j, k)).exp())
}

/// Unnormalized posterior density of `p` given minority count `j` of `k`.
pub fn posterior_pdf_unnorm(p: f64, j: u32, k: u32) -> Result<f64> {
    check(j, k)?;
    Ok(log_pdf(p, j, k).exp())
}

/// `ln ∫_{1/2}^1 p^a (1-p)^b dp`.
fn log_upper_half_beta(a: u32, b: u32) -> f64 {
    let (a, b) = (f64::from(a) + 1.0, f64::from(b) + 1.0);
    ln_beta(a, b) + beta_reg(b, a, 0.5).ln()
}

fn log_normalizer(j: u32, k: u32) -> f64 {
    let both = log_add_exp(log_upper_half_beta(j, k - j), log_upper_half_beta(k - j, j));
    if 2 * j == k {
        both - std::f64::consts::LN_2
    } else {
        both
    }
}

/// `∫_{1/2}^1` of the unnormalized posterior.
pub fn posterior_normalizer(j: u32, k: u32) -> Result<f64> {
    check(j, k)?;
    Ok(log_normalizer(j, k).exp())
}

/// Posterior mean from the incomplete-Beta closed form.
pub fn posterior_mean(j: u32, k: u32) -> Result<f64> {
    check(j, k)?;
    // For a tie both sums double-count the same term, so the ratio is unaffected.
    let num = log_add_exp(log_upper_half_beta(j + 1, k - j), log_upper_half_beta(k - j + 1, j));
    let den = log_add_exp(log_upper_half_beta(j, k - j), log_upper_half_beta(k - j, j));
    Ok((num - den).exp())
}

/// Posterior mean by adaptive quadrature; an independent check on [`posterior_mean`].
pub fn posterior_mean_quadrature(j: u32, k: u32) -> Result<f64> {
    check(j, k)?;
    let log_z = log_normalizer(j, k);
    Ok(integrate(&|p: f64| p * (log_pdf(p, j, k) - log_z).exp(), 0.5, 1.0, 1e-12))
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Posterior mode on the closed interval `[1/2, 1]`.
pub fn posterior_mode(j: u32, k: u32) -> Result<f64> {
    check(j, k)?;
    const GRID: usize = 1001;
    let at = |i: usize| 0.5 + 0.5 * i as f64 / (GRID - 1) as f64;
    let lp = |p: f64| log_pdf(p, j, k);
    let best = (0..GRID)
        .max_by(|&a, &b| lp(at(a)).total_cmp(&lp(at(b))))
        .expect("grid is non-empty");
    let lo = at(best.saturating_sub(1));
    let hi = at((best + 1).min(GRID - 1));
    let refined = golden_max(lp, lo, hi, 1e-10);
    // Endpoints compete with the interior refinement.
    Ok([refined, lo, hi, at(best)]
        .into_iter()
        .max_by(|a, b| lp(*a).total_cmp(&lp(*b)))
        .expect("non-empty"))
}

/// Posterior median, found by bisection on the quadrature CDF to 1e-8.
pub fn posterior_median(j: u32, k: u32) -> Result<f64> {
    check(j, k)?;
    let log_z = log_normalizer(j, k);
    let pdf = |p: f64| (log_pdf(p, j, k) - log_z).exp();
    let (mut lo, mut hi) = (0.5, 1.0);
    let mut mass_lo = 0.0;
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        let mass_mid = mass_lo + integrate(&pdf, lo, mid, 1e-13);
        if mass_mid < 0.5 {
            lo = mid;
            mass_lo = mass_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Summary {
    Mode,
    Median,
    Mean,
}

/// Memoizes posterior summaries per `(j, k)`; one cache per run.
#[derive(Debug, Default, Clone)]
pub struct PosteriorCache {
    values: HashMap<(Summary, u32, u32), f64>,
}

impl PosteriorCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&mut self, which: Summary, j: u32, k: u32, compute: fn(u32, u32) -> Result<f64>) -> Result<f64> {
        if let Some(v) = self.values.get(&(which, j, k)) {
            return Ok(*v);
        }
        let v = compute(j, k)?;
        self.values.insert((which, j, k), v);
        Ok(v)
    }

    pub fn mode(&mut self, j: u32, k: u32) -> Result<f64> {
        self.get(Summary::Mode, j, k, posterior_mode)
    }

    pub fn median(&mut self, j: u32, k: u32) -> Result<f64> {
        self.get(Summary::Median, j, k, posterior_median)
    }

    pub fn mean(&mut self, j: u32, k: u32) -> Result<f64> {
        self.get(Summary::Mean, j, k, posterior_mean)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn likelihood_examples() {
        assert_abs_diff_eq!(majority_likelihood(1, 4, 0.7).unwrap(), 0.4872, epsilon = 1e-12);
        assert_abs_diff_eq!(majority_likelihood(2, 4, 0.7).unwrap(), 0.2646, epsilon = 1e-12);
        for k in [1, 2, 7, 10, 31] {
            for p in [0.5, 0.66, 0.9, 1.0] {
                let total: f64 = (0..=k / 2).map(|j| majority_likelihood(j, k, p).unwrap()).sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
        assert!(matches!(majority_likelihood(3, 4, 0.7), Err(GpbaError::InvalidCount { .. })));
    }

    #[test]
    fn pdf_examples() {
        assert_abs_diff_eq!(posterior_pdf_unnorm(0.75, 0, 2).unwrap(), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(posterior_pdf_unnorm(0.75, 1, 2).unwrap(), 0.1875, epsilon = 1e-15);
        assert_abs_diff_eq!(posterior_pdf_unnorm(0.5 + 1e-12, 0, 2).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn mode_examples() {
        assert_abs_diff_eq!(posterior_mode(0, 2).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(posterior_mode(1, 2).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(posterior_mode(3, 10).unwrap(), 0.680, epsilon = 5e-3);
    }

    #[test]
    fn median_examples() {
        let m = posterior_median(1, 2).unwrap();
        assert_abs_diff_eq!(m * m / 2.0 - m * m * m / 3.0, 0.125, epsilon = 1e-8);
        assert_abs_diff_eq!(m, 0.6735, epsilon = 2e-4);
        let m = posterior_median(0, 2).unwrap();
        assert_abs_diff_eq!(m.powi(3) - (1.0 - m).powi(3), 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(m, 0.7983, epsilon = 5e-4);
        assert_abs_diff_eq!(posterior_median(2, 4).unwrap(), 0.6405, epsilon = 1e-4);
    }

    #[test]
    fn mean_examples() {
        assert_abs_diff_eq!(posterior_mean(0, 2).unwrap(), 25.0 / 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(posterior_mean(1, 2).unwrap(), 11.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(posterior_mean(2, 4).unwrap(), 21.0 / 32.0, epsilon = 1e-12);
    }

    #[test]
    fn large_batches_stay_finite() {
        for (j, k) in [(0, 2000), (400, 2000), (1000, 2000), (120, 250)] {
            let mean = posterior_mean(j, k).unwrap();
            let median = posterior_median(j, k).unwrap();
            let mode = posterior_mode(j, k).unwrap();
            for v in [mean, median, mode] {
                assert!((0.5..=1.0).contains(&v), "({j},{k}) -> {v}");
            }
            assert_abs_diff_eq!(mean, posterior_mean_quadrature(j, k).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn cache_reuses_values() {
        let mut cache = PosteriorCache::new();
        let a = cache.median(3, 10).unwrap();
        let b = cache.median(3, 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(cache.len(), 1);
        assert!(cache.mean(6, 10).is_err());
    }
}
