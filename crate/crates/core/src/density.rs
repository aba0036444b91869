//! The knowledge state: a normalized piecewise-constant density on a bounded
//! interval.
//!
//! Heights are stored as natural logarithms so that repeated multiplicative
//! updates with factors like `0.6^500` stay representable. Every knot is a
//! past query location; adjacent intervals with equal heights are never
//! merged, and intervals whose mass has been driven to zero are kept with a
//! `-inf` log-height so the original support is preserved.

use std::fmt;
use std::str::FromStr;

use crate::error::{GpbaError, Result};
use crate::numeric::log_sum_exp;

/// Distance used when pushing a proposal off a zero-mass region.
pub const NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDensity {
    knots: Vec<f64>,
    log_heights: Vec<f64>,
    /// `cum[i]` is the mass of intervals `0..i`; refreshed on every mutation.
    cum: Vec<f64>,
}

impl PiecewiseDensity {
    /// Uniform density on `(lo, hi)`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GpbaError::InvalidInterval { lo, hi });
        }
        let mut density = Self {
            knots: vec![lo, hi],
            log_heights: vec![-(hi - lo).ln()],
            cum: Vec::new(),
        };
        density.refresh_cumulative();
        Ok(density)
    }

    /// Builds a density from raw knots and (unnormalized) log-heights, then
    /// normalizes it.
    pub fn from_parts(knots: Vec<f64>, log_heights: Vec<f64>) -> Result<Self> {
        let mut density = Self::validated(knots, log_heights)?;
        density.renormalize()?;
        Ok(density)
    }

    fn validated(knots: Vec<f64>, log_heights: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || log_heights.len() + 1 != knots.len() {
            return Err(GpbaError::Parse(format!(
                "need n + 1 knots for n heights, got {} knots and {} heights",
                knots.len(),
                log_heights.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GpbaError::InvalidInterval {
                lo: knots[0],
                hi: knots[knots.len() - 1],
            });
        }
        if log_heights.iter().any(|h| h.is_nan() || *h == f64::INFINITY) {
            return Err(GpbaError::Parse("log-heights must be finite or -inf".into()));
        }
        Ok(Self {
            knots,
            log_heights,
            cum: Vec::new(),
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn log_heights(&self) -> &[f64] {
        &self.log_heights
    }

    pub fn n_intervals(&self) -> usize {
        self.log_heights.len()
    }

    /// Total mass recomputed from scratch (not from the cached cumulative sums).
    pub fn total_mass(&self) -> f64 {
        self.log_heights
            .iter()
            .zip(self.knots.windows(2))
            .map(|(lh, w)| lh.exp() * (w[1] - w[0]))
            .sum()
    }

    fn interval_of(&self, x: f64) -> usize {
        // Index i with knots[i] <= x < knots[i + 1], clamped to a valid interval.
        let pos = self.knots.partition_point(|&k| k <= x);
        pos.saturating_sub(1).min(self.n_intervals() - 1)
    }

    /// Density value at `x`; zero outside the support.
    pub fn density_at(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        self.log_heights[self.interval_of(x)].exp()
    }

    /// CDF at `x`. Points outside the support clamp to 0 or 1.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let i = self.interval_of(x);
        let value = self.cum[i] + self.log_heights[i].exp() * (x - self.knots[i]);
        value.clamp(0.0, 1.0)
    }

    /// Mass right of `x`, summed from the right end so that a tiny tail
    /// keeps its relative precision where `1 - F(x)` would round to zero.
    pub fn upper_mass(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 1.0;
        }
        if x >= hi {
            return 0.0;
        }
        let i = self.interval_of(x);
        let tail: f64 = self.log_heights[i + 1..]
            .iter()
            .zip(self.knots[i + 1..].windows(2))
            .rev()
            .map(|(lh, w)| lh.exp() * (w[1] - w[0]))
            .sum();
        (tail + self.log_heights[i].exp() * (self.knots[i + 1] - x)).clamp(0.0, 1.0)
    }

    /// Smallest `x` with `F(x) >= q`, by linear interpolation inside the
    /// interval that carries the `q`-th unit of mass.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(GpbaError::InvalidProbability(q));
        }
        let n = self.n_intervals();
        let mut i = self.cum[1..].partition_point(|&c| c < q);
        if i >= n {
            // Rounding left the final cumulative mass a hair below q.
            i = self
                .last_positive_interval()
                .ok_or(GpbaError::DegenerateUpdate("density carries no mass"))?;
        }
        let height = self.log_heights[i].exp();
        let x = self.knots[i] + (q - self.cum[i]) / height;
        Ok(x.clamp(self.knots[i], self.knots[i + 1]))
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).expect("0.5 is a valid probability")
    }

    /// Symmetric `(1 - alpha)` credible interval `(F^-1(alpha/2), F^-1(1 - alpha/2))`.
    pub fn credible_interval(&self, alpha: f64) -> Result<(f64, f64)> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(GpbaError::InvalidProbability(alpha));
        }
        Ok((self.quantile(alpha / 2.0)?, self.quantile(1.0 - alpha / 2.0)?))
    }

    fn first_positive_interval(&self) -> Option<usize> {
        self.log_heights.iter().position(|h| *h > f64::NEG_INFINITY)
    }

    fn last_positive_interval(&self) -> Option<usize> {
        self.log_heights.iter().rposition(|h| *h > f64::NEG_INFINITY)
    }

    /// Inserts a knot at `x` (if not already present) and returns its index.
    fn insert_knot(&mut self, x: f64) -> usize {
        let pos = self.knots.partition_point(|&k| k < x);
        if self.knots[pos] == x {
            return pos;
        }
        let split_height = self.log_heights[pos - 1];
        self.knots.insert(pos, x);
        self.log_heights.insert(pos - 1, split_height);
        pos
    }

    /// Inserts a knot at `x`, adds `log_right` to every log-height right of
    /// `x` and `log_left` to every log-height left of it, then renormalizes.
    ///
    /// A `-inf` factor zeroes that side entirely.
    pub fn apply_split_scaling(&mut self, x: f64, log_right: f64, log_left: f64) -> Result<()> {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return Err(GpbaError::InvalidSplit { x, lo, hi });
        }
        if log_right.is_nan() || log_left.is_nan() {
            return Err(GpbaError::DegenerateUpdate("scaling factor is NaN"));
        }
        if log_right == f64::INFINITY || log_left == f64::INFINITY {
            return Err(GpbaError::DegenerateUpdate("scaling factor is infinite"));
        }
        if log_right == f64::NEG_INFINITY && log_left == f64::NEG_INFINITY {
            return Err(GpbaError::DegenerateUpdate("both scaling factors are zero"));
        }
        let backup = (self.knots.clone(), self.log_heights.clone());
        let split = self.insert_knot(x);
        for (i, lh) in self.log_heights.iter_mut().enumerate() {
            *lh += if i < split { log_left } else { log_right };
        }
        if let Err(e) = self.renormalize() {
            (self.knots, self.log_heights) = backup;
            self.refresh_cumulative();
            return Err(e);
        }
        Ok(())
    }

    fn renormalize(&mut self) -> Result<()> {
        let log_total = log_sum_exp(
            self.log_heights
                .iter()
                .zip(self.knots.windows(2))
                .map(|(lh, w)| lh + (w[1] - w[0]).ln()),
        );
        if !log_total.is_finite() {
            return Err(GpbaError::DegenerateUpdate("no probability mass left"));
        }
        for lh in &mut self.log_heights {
            *lh -= log_total;
        }
        self.refresh_cumulative();
        Ok(())
    }

    fn refresh_cumulative(&mut self) {
        self.cum.clear();
        self.cum.reserve(self.knots.len());
        let mut acc = 0.0;
        self.cum.push(acc);
        for (lh, w) in self.log_heights.iter().zip(self.knots.windows(2)) {
            acc += lh.exp() * (w[1] - w[0]);
            self.cum.push(acc);
        }
    }

    /// Moves `x` into the positive-mass region so that `0 < F(x) < 1`.
    ///
    /// Points already inside a positive-density interval (and not on the outer
    /// edge of the positive-mass region) are returned unchanged; otherwise the
    /// point lands [`NUDGE`] inside the nearest positive-mass interval.
    pub fn nudge_into_support(&self, x: f64) -> f64 {
        let (Some(first), Some(last)) = (self.first_positive_interval(), self.last_positive_interval())
        else {
            return x;
        };
        let inside = |i: usize, from_left: bool| {
            let (a, b) = (self.knots[i], self.knots[i + 1]);
            let step = NUDGE.min(0.5 * (b - a));
            if from_left {
                a + step
            } else {
                b - step
            }
        };
        if x <= self.knots[first] {
            return inside(first, true);
        }
        if x >= self.knots[last + 1] {
            return inside(last, false);
        }
        let i = self.interval_of(x);
        if self.log_heights[i] > f64::NEG_INFINITY {
            return x;
        }
        // Inside an interior zero-mass gap: go to the closer neighbouring edge.
        let left = (0..i).rev().find(|&j| self.log_heights[j] > f64::NEG_INFINITY);
        let right = (i + 1..self.n_intervals()).find(|&j| self.log_heights[j] > f64::NEG_INFINITY);
        match (left, right) {
            (Some(l), Some(r)) => {
                if x - self.knots[l + 1] <= self.knots[r] - x {
                    inside(l, false)
                } else {
                    inside(r, true)
                }
            }
            (Some(l), None) => inside(l, false),
            (None, Some(r)) => inside(r, true),
            (None, None) => x,
        }
    }
}

/// Plain-text record: a header line, then one `knot log_height` line per
/// interval, then the final knot. Numbers carry 17 significant digits.
impl fmt::Display for PiecewiseDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "piecewise-density {}", self.n_intervals())?;
        for (knot, lh) in self.knots.iter().zip(&self.log_heights) {
            writeln!(f, "{knot:.16e} {lh:.16e}")?;
        }
        writeln!(f, "{:.16e}", self.knots[self.knots.len() - 1])
    }
}

impl FromStr for PiecewiseDensity {
    type Err = GpbaError;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| GpbaError::Parse("empty record".into()))?;
        let n: usize = header
            .strip_prefix("piecewise-density ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| GpbaError::Parse(format!("bad header line {header:?}")))?;
        let num = |tok: &str| {
            tok.parse::<f64>()
                .map_err(|_| GpbaError::Parse(format!("bad number {tok:?}")))
        };
        let mut knots = Vec::with_capacity(n + 1);
        let mut log_heights = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| GpbaError::Parse("record truncated".into()))?;
            let mut parts = line.split_whitespace();
            let (Some(k), Some(h), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(GpbaError::Parse(format!("bad interval line {line:?}")));
            };
            knots.push(num(k)?);
            log_heights.push(num(h)?);
        }
        let last = lines
            .next()
            .ok_or_else(|| GpbaError::Parse("missing final knot".into()))?;
        knots.push(num(last)?);
        if let Some(extra) = lines.next() {
            return Err(GpbaError::Parse(format!("trailing content {extra:?}")));
        }
        let mut density = Self::validated(knots, log_heights)?;
        density.refresh_cumulative();
        if (density.total_mass() - 1.0).abs() > 1e-12 {
            density.renormalize()?;
        }
        Ok(density)
    }
}
