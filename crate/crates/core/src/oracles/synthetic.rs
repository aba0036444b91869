use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{check_domain, Oracle};
use crate::error::{GpbaError, Result};
use crate::numeric::norm_cdf;

const ROOT: f64 = 1.0 / 3.0;

/// The three benchmark functions on `(0, 1)`, all with root `1/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    /// Linear, constant noise 0.2.
    H1,
    /// Exponential, noise 0.2 left of the root and 1 from the root on.
    H2,
    /// Cubic, constant noise 0.025; nearly flat around the root.
    H3,
}

impl TestFunction {
    pub fn mean(self, x: f64) -> f64 {
        let d = ROOT - x;
        match self {
            TestFunction::H1 => d,
            TestFunction::H2 => (2.0 * d).exp() - 1.0,
            TestFunction::H3 => d * d * d,
        }
    }

    pub fn noise(self, x: f64) -> f64 {
        match self {
            TestFunction::H1 => 0.2,
            TestFunction::H2 if x < ROOT => 0.2,
            TestFunction::H2 => 1.0,
            TestFunction::H3 => 0.025,
        }
    }

    pub fn root(self) -> f64 {
        ROOT
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFunction::H1 => "h1",
            TestFunction::H2 => "h2",
            TestFunction::H3 => "h3",
        })
    }
}

impl FromStr for TestFunction {
    type Err = GpbaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h1" => Ok(TestFunction::H1),
            "h2" => Ok(TestFunction::H2),
            "h3" => Ok(TestFunction::H3),
            other => Err(GpbaError::Parse(format!("unknown test function {other:?}"))),
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `Z(x) = h(x) + σ(x) ε` with standard normal `ε`.
///
/// `h` must be positive left of the root and negative right of it.
#[derive(Clone)]
pub struct SyntheticOracle {
    mean: RealFn,
    scale: RealFn,
    root: f64,
    domain: (f64, f64),
    rng: ChaCha8Rng,
}

impl fmt::Debug for SyntheticOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntheticOracle")
            .field("root", &self.root)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl SyntheticOracle {
    pub fn new(func: TestFunction, seed: u64) -> Self {
        Self::custom(
            move |x| func.mean(x),
            move |x| func.noise(x),
            func.root(),
            (0.0, 1.0),
            seed,
        )
    }

    pub fn custom(
        mean: impl Fn(f64) -> f64 + Send + Sync + 'static,
        scale: impl Fn(f64) -> f64 + Send + Sync + 'static,
        root: f64,
        domain: (f64, f64),
        seed: u64,
    ) -> Self {
        Self {
            mean: Arc::new(mean),
            scale: Arc::new(scale),
            root,
            domain,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn mean_at(&self, x: f64) -> f64 {
        (self.mean)(x)
    }
}

impl Oracle for SyntheticOracle {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn sample(&mut self, x: f64) -> Result<f64> {
        check_domain(x, self.domain)?;
        let eps: f64 = self.rng.sample(StandardNormal);
        Ok((self.mean)(x) + (self.scale)(x) * eps)
    }

    fn true_root(&self) -> Option<f64> {
        Some(self.root)
    }

    fn true_p(&self, x: f64) -> Option<f64> {
        let h = (self.mean)(x).abs();
        let s = (self.scale)(x);
        Some(match (h > 0.0, s > 0.0) {
            (_, true) => norm_cdf(h / s),
            (true, false) => 1.0,
            (false, false) => 0.5,
        })
    }

    fn noise_scale(&self, x: f64) -> Option<f64> {
        Some((self.scale)(x))
    }
}

/// Sign oracle that points toward `root` with the same probability `p`
/// everywhere except at the root itself.
#[derive(Debug, Clone)]
pub struct ConstantAccuracyOracle {
    p: f64,
    root: f64,
    domain: (f64, f64),
    rng: ChaCha8Rng,
}

impl ConstantAccuracyOracle {
    pub fn new(p: f64, root: f64, domain: (f64, f64), seed: u64) -> Result<Self> {
        if !(0.5..=1.0).contains(&p) {
            return Err(GpbaError::InvalidAccuracy(p));
        }
        Ok(Self {
            p,
            root,
            domain,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl Oracle for ConstantAccuracyOracle {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn sample(&mut self, x: f64) -> Result<f64> {
        check_domain(x, self.domain)?;
        let toward = if x < self.root { 1.0 } else { -1.0 };
        let correct = self.rng.random::<f64>() < self.true_p(x).unwrap_or(self.p);
        Ok(if correct { toward } else { -toward })
    }

    fn true_root(&self) -> Option<f64> {
        Some(self.root)
    }

    fn true_p(&self, x: f64) -> Option<f64> {
        Some(if x == self.root { 0.5 } else { self.p })
    }

    fn has_functional(&self) -> bool {
        false
    }
}
