//! Estimators of the oracle accuracy `p(x)` from one batch of responses.

mod bayes;

pub use bayes::{
    majority_likelihood, posterior_mean, posterior_mean_quadrature, posterior_median,
    posterior_mode, posterior_normalizer, posterior_pdf_unnorm, PosteriorCache,
};

use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{GpbaError, Result};
use crate::numeric::norm_cdf;
use crate::updating::Direction;

/// Sufficient statistics of one batch at a single location.
///
/// `k` counts raw oracle calls. Signs may be pre-averaged, so `n_right` counts
/// right-pointing signs out of `n_signs` (equal to `k` without pre-averaging).
/// The functional sums always cover all `k` raw responses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchStats {
    pub k: u32,
    pub n_signs: u32,
    pub n_right: u32,
    pub moments: Option<Moments>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub sum_z: f64,
    pub sum_z_sq: f64,
}

impl BatchStats {
    /// Sign-only statistics.
    pub fn from_signs(n_right: u32, k: u32) -> Self {
        Self { k, n_signs: k, n_right, moments: None }
    }

    /// Statistics of raw functional responses, one sign per response.
    pub fn from_values(values: &[f64]) -> Self {
        let mut stats = Self {
            k: 0,
            n_signs: 0,
            n_right: 0,
            moments: Some(Moments::default()),
        };
        for &z in values {
            stats.push(z);
        }
        stats
    }

    /// Adds one raw response that also contributes one sign.
    pub fn push(&mut self, z: f64) {
        self.k += 1;
        self.n_signs += 1;
        if z > 0.0 {
            self.n_right += 1;
        }
        if let Some(m) = &mut self.moments {
            m.sum_z += z;
            m.sum_z_sq += z * z;
        }
    }

    /// Minority count `min(n_right, n_signs - n_right)`.
    pub fn minority(&self) -> u32 {
        self.n_right.min(self.n_signs - self.n_right)
    }

    /// Direction of the strict sign majority; ties resolve to `Right`.
    pub fn majority_direction(&self) -> Direction {
        if 2 * self.n_right >= self.n_signs {
            Direction::Right
        } else {
            Direction::Left
        }
    }

    /// Sample mean of the functional responses.
    pub fn mean(&self) -> Option<f64> {
        self.moments.map(|m| m.sum_z / f64::from(self.k))
    }
}

/// Share of the batch agreeing with the majority sign.
pub fn empirical_majority(stats: &BatchStats) -> f64 {
    let frac = f64::from(stats.n_right) / f64::from(stats.n_signs);
    frac.max(1.0 - frac)
}

/// Probability that a strict majority of `k` independent votes, each correct
/// with probability `accuracy`, is correct. Even-`k` ties count as incorrect.
pub fn boost_majority(accuracy: f64, k: u32) -> f64 {
    let votes = Binomial::new(accuracy, u64::from(k)).expect("accuracy lies in [0, 1]");
    votes.sf(u64::from(k / 2))
}

/// Normal-approximation probability that the sign of the batch mean is
/// correct, together with that sign.
///
/// A batch with zero sample variance is treated as noiseless and returns 1
/// (or 1/2 when the mean is exactly zero).
pub fn clt_prob(stats: &BatchStats) -> Result<(f64, Direction)> {
    let m = stats
        .moments
        .ok_or_else(|| GpbaError::Config("functional estimator needs functional responses".into()))?;
    if stats.k < 2 {
        return Err(GpbaError::UnsupportedBatch { k: stats.k, min: 2 });
    }
    let k = f64::from(stats.k);
    let mean = m.sum_z / k;
    let direction = if mean < 0.0 { Direction::Left } else { Direction::Right };
    let var = ((m.sum_z_sq - k * mean * mean) / (k - 1.0)).max(0.0);
    // Below this the variance is indistinguishable from rounding noise in the sums.
    if var <= 1e-28 * (m.sum_z_sq / k).max(f64::MIN_POSITIVE) {
        let p = if mean == 0.0 { 0.5 } else { 1.0 };
        return Ok((p, direction));
    }
    Ok((norm_cdf(k.sqrt() * mean.abs() / var.sqrt()), direction))
}

/// Exact bias `E[p̄] - p` of the majority proportion for a batch of `k`
/// responses with accuracy `p`.
pub fn exact_bias(p: f64, k: u32) -> Result<f64> {
    if k < 3 {
        return Err(GpbaError::UnsupportedBatch { k, min: 3 });
    }
    if !(0.5..=1.0).contains(&p) {
        return Err(GpbaError::InvalidAccuracy(p));
    }
    let half_up = u64::from(k.div_ceil(2));
    let full = Binomial::new(p, u64::from(k)).expect("valid accuracy");
    let short = Binomial::new(p, u64::from(k - 1)).expect("valid accuracy");
    Ok(full.cdf(half_up - 1) - 2.0 * p * short.cdf(half_up - 2))
}

/// Boundary `σ √((k+1)(ln(k+1) − 2 ln α))` for a random walk of `k` steps
/// with per-step noise `sigma`, crossing which certifies the drift sign.
pub fn tpo_boundary(k: u32, sigma: f64, alpha: f64) -> f64 {
    let n = f64::from(k) + 1.0;
    sigma * (n * (n.ln() - 2.0 * alpha.ln())).sqrt()
}

/// Clamps an accuracy estimate into `[1/2, 1 - 1/(2k)]` so a unanimous
/// finite batch never removes all mass from one side.
pub fn clamp_estimate(accuracy: f64, k: u32) -> f64 {
    let upper = 1.0 - 0.5 / f64::from(k.max(1));
    accuracy.max(0.5).min(upper)
}
