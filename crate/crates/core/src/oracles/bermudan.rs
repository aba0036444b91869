//! Pathwise timing value of a Bermudan put as a root-finding oracle.
//!
//! At date `t` and spot `x` the oracle simulates one price path, stops at the
//! first later date where the spot is at or below that date's exercise
//! boundary, and returns the discounted stopped payoff minus the discounted
//! immediate payoff. The sign is flipped so that, as everywhere in the crate,
//! positive values point right: early exercise is optimal left of the root.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::lattice::{lattice_boundary, BoundaryTable};
use super::{check_domain, Oracle};
use crate::error::{GpbaError, Result};

/// Contract, market and discretization parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BermudanSetup {
    pub strike: f64,
    pub rate: f64,
    pub maturity: f64,
    pub volatility: f64,
    pub n_dates: usize,
    /// Exercise date whose boundary is sought (1-based).
    pub eval_date: usize,
    pub lattice_steps: usize,
    pub domain: (f64, f64),
}

impl Default for BermudanSetup {
    fn default() -> Self {
        Self {
            strike: 40.0,
            rate: 0.06,
            maturity: 1.0,
            volatility: 0.2,
            n_dates: 50,
            eval_date: 30,
            lattice_steps: 5000,
            domain: (25.0, 40.0),
        }
    }
}

impl BermudanSetup {
    pub fn validate(&self) -> Result<()> {
        if self.eval_date == 0 || self.eval_date >= self.n_dates {
            return Err(GpbaError::Config(format!(
                "evaluation date {} must lie in 1..{}",
                self.eval_date, self.n_dates
            )));
        }
        if !(self.domain.0 < self.domain.1) {
            return Err(GpbaError::InvalidInterval { lo: self.domain.0, hi: self.domain.1 });
        }
        Ok(())
    }

    pub fn eval_time(&self) -> f64 {
        self.maturity * self.eval_date as f64 / self.n_dates as f64
    }

    pub fn boundary(&self) -> Result<BoundaryTable> {
        self.validate()?;
        lattice_boundary(
            self.strike,
            self.rate,
            self.volatility,
            self.maturity,
            self.n_dates,
            self.lattice_steps,
        )
    }
}

#[derive(Debug, Clone)]
pub struct BermudanPut {
    setup: BermudanSetup,
    boundary: Arc<BoundaryTable>,
    drift: f64,
    diffusion: f64,
    rng: ChaCha8Rng,
}

impl BermudanPut {
    /// `boundary` must come from the same setup; share it across replications.
    pub fn new(setup: BermudanSetup, boundary: Arc<BoundaryTable>, seed: u64) -> Result<Self> {
        setup.validate()?;
        if boundary.n_dates() != setup.n_dates {
            return Err(GpbaError::Config("boundary table does not match the date grid".into()));
        }
        let dt = setup.maturity / setup.n_dates as f64;
        Ok(Self {
            drift: (setup.rate - 0.5 * setup.volatility * setup.volatility) * dt,
            diffusion: setup.volatility * dt.sqrt(),
            setup,
            boundary,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn setup(&self) -> &BermudanSetup {
        &self.setup
    }

    pub fn boundary(&self) -> &BoundaryTable {
        &self.boundary
    }

    fn discounted_payoff(&self, date: usize, spot: f64) -> f64 {
        let t = self.boundary.time_of(date);
        (-self.setup.rate * t).exp() * (self.setup.strike - spot).max(0.0)
    }

    /// Raw timing value before the sign flip.
    pub fn timing_value(&mut self, x: f64) -> Result<f64> {
        check_domain(x, self.setup.domain)?;
        let start = self.setup.eval_date;
        let mut spot = x;
        let mut stop = self.setup.n_dates;
        for date in start + 1..=self.setup.n_dates {
            let eps: f64 = self.rng.sample(StandardNormal);
            spot *= (self.drift + self.diffusion * eps).exp();
            if spot <= self.boundary.at(date) {
                stop = date;
                break;
            }
        }
        Ok(self.discounted_payoff(stop, spot) - self.discounted_payoff(start, x))
    }
}

impl Oracle for BermudanPut {
    fn domain(&self) -> (f64, f64) {
        self.setup.domain
    }

    fn sample(&mut self, x: f64) -> Result<f64> {
        self.timing_value(x).map(|v| -v)
    }

    fn true_root(&self) -> Option<f64> {
        Some(self.boundary.at(self.setup.eval_date))
    }
}
