//! Knowledge-state transitions: the single-response update and its batched
//! generalization.
//!
//! Sign convention used everywhere in the crate: a response of `+1`
//! ([`Direction::Right`]) is evidence that the root lies to the right of the
//! query point.

use crate::density::PiecewiseDensity;
use crate::error::{GpbaError, Result};
use crate::numeric::{count_log, log_add_exp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    /// `Right` for a positive value, `Left` otherwise.
    pub fn from_value(v: f64) -> Self {
        if v > 0.0 {
            Direction::Right
        } else {
            Direction::Left
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Direction::Right => 1,
            Direction::Left => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }
}

/// Evidence fed into one state transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateSignal {
    /// `n_right` of `k` responses pointed right; each is correct with probability `accuracy`.
    Counts { n_right: u32, k: u32, accuracy: f64 },
    /// A single aggregated direction, correct with probability `accuracy`.
    Boosted { direction: Direction, accuracy: f64 },
}

impl UpdateSignal {
    pub fn accuracy(&self) -> f64 {
        match *self {
            UpdateSignal::Counts { accuracy, .. } | UpdateSignal::Boosted { accuracy, .. } => accuracy,
        }
    }

    /// Applies this signal at `x`.
    pub fn apply(&self, f: &mut PiecewiseDensity, x: f64) -> Result<()> {
        match *self {
            UpdateSignal::Counts { .. } => batched_update(f, x, self),
            UpdateSignal::Boosted { direction, accuracy } => step_update(f, x, direction, accuracy),
        }
    }
}

fn check_accuracy(p: f64) -> Result<()> {
    if (0.5..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GpbaError::InvalidAccuracy(p))
    }
}

/// `(F(x), 1 - F(x))` at an interior point, each side computed directly,
/// rejecting points outside the positive-mass region.
fn interior_split(f: &PiecewiseDensity, x: f64) -> Result<(f64, f64)> {
    let (lo, hi) = f.support();
    if !(x > lo && x < hi) {
        return Err(GpbaError::InvalidSplit { x, lo, hi });
    }
    let (lower, upper) = (f.cdf(x), f.upper_mass(x));
    if lower <= 0.0 || upper <= 0.0 {
        return Err(GpbaError::DegenerateUpdate(
            "query point has all posterior mass on one side",
        ));
    }
    Ok((lower, upper))
}

/// Probability that a single response at `x` points right:
/// `p (1 - F(x)) + (1 - p) F(x)`.
pub fn right_response_prob(f: &PiecewiseDensity, x: f64, p: f64) -> f64 {
    let (lower, upper) = (f.cdf(x), f.upper_mass(x));
    // Dividing by the computed total makes p = 1/2 give exactly 1/2.
    (p * upper + (1.0 - p) * lower) / (lower + upper)
}

/// Bayes update for one response `y` at `x` from an oracle with accuracy `p`.
pub fn step_update(f: &mut PiecewiseDensity, x: f64, y: Direction, p: f64) -> Result<()> {
    check_accuracy(p)?;
    let (lower, upper) = interior_split(f, x)?;
    let right = p * upper + (1.0 - p) * lower;
    let left = p * lower + (1.0 - p) * upper;
    let (log_right, log_left) = match y {
        Direction::Right => (p.ln() - right.ln(), (1.0 - p).ln() - right.ln()),
        Direction::Left => ((1.0 - p).ln() - left.ln(), p.ln() - left.ln()),
    };
    f.apply_split_scaling(x, log_right, log_left)
}

/// Log scaling factors `(ln R, ln L)` for `n_right` right-pointing responses out of `k`.
fn batched_log_factors(f: &PiecewiseDensity, x: f64, n_right: u32, k: u32, accuracy: f64) -> Result<(f64, f64)> {
    check_accuracy(accuracy)?;
    if k == 0 || n_right > k {
        return Err(GpbaError::InvalidCount { j: n_right, k });
    }
    let (lower, upper) = interior_split(f, x)?;
    let log_lik = count_log(n_right, accuracy) + count_log(k - n_right, 1.0 - accuracy);
    let log_lik_mirrored = count_log(n_right, 1.0 - accuracy) + count_log(k - n_right, accuracy);
    let log_c = log_add_exp(log_lik_mirrored + lower.ln(), log_lik + upper.ln());
    if !log_c.is_finite() {
        return Err(GpbaError::DegenerateUpdate(
            "responses are impossible under the supplied accuracy",
        ));
    }
    Ok((log_lik - log_c, log_lik_mirrored - log_c))
}

/// Batched update for a [`UpdateSignal::Counts`] signal: equivalent to `k`
/// single-response updates at the same point in any order.
pub fn batched_update(f: &mut PiecewiseDensity, x: f64, signal: &UpdateSignal) -> Result<()> {
    let UpdateSignal::Counts { n_right, k, accuracy } = *signal else {
        return Err(GpbaError::Config("batched update needs a count signal".into()));
    };
    let (log_right, log_left) = batched_log_factors(f, x, n_right, k, accuracy)?;
    f.apply_split_scaling(x, log_right, log_left)
}

/// The factor applied to the density right of `x`; above 1 exactly when the
/// batch favours a root to the right.
pub fn right_scaling_factor(f: &PiecewiseDensity, x: f64, signal: &UpdateSignal) -> Result<f64> {
    let UpdateSignal::Counts { n_right, k, accuracy } = *signal else {
        return Err(GpbaError::Config("scaling factor needs a count signal".into()));
    };
    batched_log_factors(f, x, n_right, k, accuracy).map(|(r, _)| r.exp())
}

/// Single-response update driven by an aggregated direction.
pub fn boosted_update(f: &mut PiecewiseDensity, x: f64, signal: &UpdateSignal) -> Result<()> {
    let UpdateSignal::Boosted { direction, accuracy } = *signal else {
        return Err(GpbaError::Config("boosted update needs a direction signal".into()));
    };
    step_update(f, x, direction, accuracy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit() -> PiecewiseDensity {
        PiecewiseDensity::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn right_response_values() {
        let f = unit();
        assert_abs_diff_eq!(right_response_prob(&f, 0.5, 0.7), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(right_response_prob(&f, 0.25, 0.7), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(right_response_prob(&f, 0.8, 0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn step_update_both_directions() {
        let mut f = unit();
        step_update(&mut f, 0.5, Direction::Right, 0.7).unwrap();
        assert_abs_diff_eq!(f.density_at(0.75), 1.4, epsilon = 1e-12);
        assert_abs_diff_eq!(f.density_at(0.25), 0.6, epsilon = 1e-12);
        let mut g = unit();
        step_update(&mut g, 0.5, Direction::Left, 0.7).unwrap();
        assert_abs_diff_eq!(g.density_at(0.75), 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(g.density_at(0.25), 1.4, epsilon = 1e-12);
    }

    #[test]
    fn uninformative_step_is_identity() {
        let mut f = unit();
        step_update(&mut f, 0.3, Direction::Right, 0.5).unwrap();
        assert_abs_diff_eq!(f.density_at(0.1), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.density_at(0.9), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn step_rejects_undemocratic_oracle() {
        let mut f = unit();
        assert!(matches!(
            step_update(&mut f, 0.5, Direction::Right, 0.4),
            Err(GpbaError::InvalidAccuracy(_))
        ));
    }

    #[test]
    fn batched_example() {
        let mut f = unit();
        let s = UpdateSignal::Counts { n_right: 2, k: 2, accuracy: 0.7 };
        assert_abs_diff_eq!(right_scaling_factor(&f, 0.5, &s).unwrap(), 0.49 / 0.29, epsilon = 1e-12);
        batched_update(&mut f, 0.5, &s).unwrap();
        assert_abs_diff_eq!(f.density_at(0.75), 0.49 / 0.29, epsilon = 1e-12);
        assert_abs_diff_eq!(f.density_at(0.25), 0.09 / 0.29, epsilon = 1e-12);
    }

    #[test]
    fn balanced_batch_is_identity() {
        let mut f = unit();
        let s = UpdateSignal::Counts { n_right: 5, k: 10, accuracy: 0.8 };
        assert_abs_diff_eq!(right_scaling_factor(&f, 0.4, &s).unwrap(), 1.0, epsilon = 1e-12);
        batched_update(&mut f, 0.4, &s).unwrap();
        assert_abs_diff_eq!(f.density_at(0.9), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_response_batch_matches_step() {
        let mut a = unit();
        let mut b = unit();
        batched_update(&mut a, 0.3, &UpdateSignal::Counts { n_right: 1, k: 1, accuracy: 0.65 }).unwrap();
        step_update(&mut b, 0.3, Direction::Right, 0.65).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(a.density_at(x), b.density_at(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn perfect_accuracy_doubles_right_side() {
        let f = unit();
        let s = UpdateSignal::Counts { n_right: 7, k: 7, accuracy: 1.0 };
        assert_abs_diff_eq!(right_scaling_factor(&f, 0.5, &s).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn contradictory_perfect_batch_is_degenerate() {
        let mut f = unit();
        let s = UpdateSignal::Counts { n_right: 3, k: 7, accuracy: 1.0 };
        assert!(matches!(batched_update(&mut f, 0.5, &s), Err(GpbaError::DegenerateUpdate(_))));
    }

    #[test]
    fn boosted_example_and_symmetry() {
        let mut f = unit();
        boosted_update(&mut f, 0.5, &UpdateSignal::Boosted { direction: Direction::Right, accuracy: 0.784 }).unwrap();
        assert_abs_diff_eq!(f.density_at(0.75), 1.568, epsilon = 1e-12);
        let mut g = unit();
        boosted_update(&mut g, 0.5, &UpdateSignal::Boosted { direction: Direction::Left, accuracy: 0.784 }).unwrap();
        assert_abs_diff_eq!(g.density_at(0.25), 1.568, epsilon = 1e-12);
    }

    #[test]
    fn update_in_zero_mass_region_is_degenerate() {
        let mut f = unit();
        f.apply_split_scaling(0.5, 0.0, f64::NEG_INFINITY).unwrap();
        assert!(matches!(
            step_update(&mut f, 0.25, Direction::Right, 0.7),
            Err(GpbaError::DegenerateUpdate(_))
        ));
    }
}
