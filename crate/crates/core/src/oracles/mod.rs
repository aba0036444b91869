//! Noisy oracles and batch queries.
//!
//! Every oracle reports responses in the crate-wide convention: a positive
//! value is evidence that the root lies to the right of the query point.

mod bermudan;
mod lattice;
mod synthetic;

pub use bermudan::{BermudanPut, BermudanSetup};
pub use lattice::{lattice_boundary, write_boundary_csv, BoundaryTable};
pub use synthetic::{ConstantAccuracyOracle, SyntheticOracle, TestFunction};

use crate::error::{GpbaError, Result};
use crate::estimators::{BatchStats, Moments};

/// A stochastic simulator whose sign points toward a unique root.
pub trait Oracle: Send {
    /// Closed search interval.
    fn domain(&self) -> (f64, f64);

    /// One response at `x`.
    fn sample(&mut self, x: f64) -> Result<f64>;

    /// The root, when known (synthetic benchmarks and lattice ground truth).
    fn true_root(&self) -> Option<f64> {
        None
    }

    /// Probability that one response at `x` points toward the root, when known.
    fn true_p(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Standard deviation of the response noise at `x`, when known.
    fn noise_scale(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Whether response magnitudes carry information, or only their signs.
    fn has_functional(&self) -> bool {
        true
    }
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn sample(&mut self, x: f64) -> Result<f64> {
        (**self).sample(x)
    }
    fn true_root(&self) -> Option<f64> {
        (**self).true_root()
    }
    fn true_p(&self, x: f64) -> Option<f64> {
        (**self).true_p(x)
    }
    fn noise_scale(&self, x: f64) -> Option<f64> {
        (**self).noise_scale(x)
    }
    fn has_functional(&self) -> bool {
        (**self).has_functional()
    }
}

pub(crate) fn check_domain(x: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if x >= lo && x <= hi {
        Ok(())
    } else {
        Err(GpbaError::Domain { x, lo, hi })
    }
}

/// `k` independent responses at `x`.
pub fn query_batch<O: Oracle + ?Sized>(oracle: &mut O, x: f64, k: u32) -> Result<BatchStats> {
    preaveraged_batch(oracle, x, k, 1)
}

/// `k` raw responses at `x`, whose signs are taken over consecutive groups of
/// `a` responses. The functional sums still cover every raw response.
pub fn preaveraged_batch<O: Oracle + ?Sized>(oracle: &mut O, x: f64, k: u32, a: u32) -> Result<BatchStats> {
    if k == 0 || a == 0 || !k.is_multiple_of(a) {
        return Err(GpbaError::Config(format!(
            "pre-averaging group {a} must divide batch size {k}"
        )));
    }
    let mut moments = Moments::default();
    let mut n_right = 0;
    for _ in 0..k / a {
        let mut group = 0.0;
        for _ in 0..a {
            let z = oracle.sample(x)?;
            group += z;
            moments.sum_z += z;
            moments.sum_z_sq += z * z;
        }
        if group > 0.0 {
            n_right += 1;
        }
    }
    Ok(BatchStats {
        k,
        n_signs: k / a,
        n_right,
        moments: oracle.has_functional().then_some(moments),
    })
}

/// Hides response magnitudes: only `±1` reaches the caller.
#[derive(Debug)]
pub struct SignOnly<O>(pub O);

impl<O: Oracle> Oracle for SignOnly<O> {
    fn domain(&self) -> (f64, f64) {
        self.0.domain()
    }
    fn sample(&mut self, x: f64) -> Result<f64> {
        Ok(if self.0.sample(x)? > 0.0 { 1.0 } else { -1.0 })
    }
    fn true_root(&self) -> Option<f64> {
        self.0.true_root()
    }
    fn true_p(&self, x: f64) -> Option<f64> {
        self.0.true_p(x)
    }
    fn noise_scale(&self, x: f64) -> Option<f64> {
        self.0.noise_scale(x)
    }
    fn has_functional(&self) -> bool {
        false
    }
}

/// Counts every call made to the wrapped oracle.
#[derive(Debug)]
pub struct CountingOracle<O> {
    pub inner: O,
    pub calls: u64,
}

impl<O> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, calls: 0 }
    }
}

impl<O: Oracle> Oracle for CountingOracle<O> {
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
    fn sample(&mut self, x: f64) -> Result<f64> {
        self.calls += 1;
        self.inner.sample(x)
    }
    fn true_root(&self) -> Option<f64> {
        self.inner.true_root()
    }
    fn true_p(&self, x: f64) -> Option<f64> {
        self.inner.true_p(x)
    }
    fn noise_scale(&self, x: f64) -> Option<f64> {
        self.inner.noise_scale(x)
    }
    fn has_functional(&self) -> bool {
        self.inner.has_functional()
    }
}
