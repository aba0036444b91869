//! Exercise boundary of a Bermudan put from a Cox-Ross-Rubinstein lattice.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{GpbaError, Result};

/// Per-date exercise threshold: exercising is optimal at or below it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTable {
    maturity: f64,
    /// `values[i - 1]` belongs to date `i`, at time `i · maturity / n`.
    values: Vec<f64>,
}

#[derive(Serialize)]
struct BoundaryRow {
    date: f64,
    boundary: f64,
}

impl BoundaryTable {
    pub fn from_values(maturity: f64, values: Vec<f64>) -> Self {
        Self { maturity, values }
    }

    pub fn n_dates(&self) -> usize {
        self.values.len()
    }

    pub fn time_of(&self, date: usize) -> f64 {
        self.maturity * date as f64 / self.n_dates() as f64
    }

    /// Boundary at exercise date `date` (1-based; the last date is maturity).
    pub fn at(&self, date: usize) -> f64 {
        self.values[date - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Writes `date,boundary` rows with the date as a time in years.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (i, &boundary) in self.values.iter().enumerate() {
            w.serialize(BoundaryRow { date: self.time_of(i + 1), boundary })?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn write_boundary_csv(table: &BoundaryTable, path: &Path) -> Result<()> {
    table.write_csv(std::fs::File::create(path)?)
}

/// Prices a Bermudan put on a CRR lattice centred at the strike, with
/// exercise allowed only on `n_dates` evenly spaced dates, and returns the
/// exercise boundary at each date.
///
/// At each date the boundary is the highest node where exercise is optimal,
/// refined by linearly interpolating the continuation-minus-intrinsic gap
/// against the next node up.
pub fn lattice_boundary(
    strike: f64,
    rate: f64,
    vol: f64,
    maturity: f64,
    n_dates: usize,
    n_steps: usize,
) -> Result<BoundaryTable> {
    if n_dates == 0 || n_steps == 0 || !n_steps.is_multiple_of(n_dates) {
        return Err(GpbaError::Config(format!(
            "lattice steps {n_steps} must be a positive multiple of the {n_dates} exercise dates"
        )));
    }
    if !(strike > 0.0 && vol > 0.0 && maturity > 0.0) {
        return Err(GpbaError::Config("strike, volatility and maturity must be positive".into()));
    }
    let dt = maturity / n_steps as f64;
    let up = (vol * dt.sqrt()).exp();
    let down = 1.0 / up;
    let growth = (rate * dt).exp();
    let q = (growth - down) / (up - down);
    if !(0.0..=1.0).contains(&q) {
        return Err(GpbaError::Config("lattice is not arbitrage-free; add steps".into()));
    }
    let disc = 1.0 / growth;
    let per_date = n_steps / n_dates;
    let spot = |step: usize, j: usize| strike * up.powi(2 * j as i32 - step as i32);
    let intrinsic = |s: f64| (strike - s).max(0.0);

    let mut values: Vec<f64> = (0..=n_steps).map(|j| intrinsic(spot(n_steps, j))).collect();
    let mut boundary = vec![0.0; n_dates];
    boundary[n_dates - 1] = strike;
    let mut cont = vec![0.0; n_steps + 1];
    for step in (0..n_steps).rev() {
        for j in 0..=step {
            cont[j] = disc * (q * values[j + 1] + (1.0 - q) * values[j]);
        }
        if step > 0 && step % per_date == 0 {
            let date = step / per_date;
            let gap = |j: usize| cont[j] - intrinsic(spot(step, j));
            let highest = (0..=step).rev().find(|&j| intrinsic(spot(step, j)) > 0.0 && gap(j) <= 0.0);
            boundary[date - 1] = match highest {
                Some(j) if j < step => {
                    let (s0, s1) = (spot(step, j), spot(step, j + 1));
                    let (g0, g1) = (gap(j), gap(j + 1));
                    s0 + (s1 - s0) * (-g0) / (g1 - g0)
                }
                Some(j) => spot(step, j),
                None => 0.0,
            };
            for j in 0..=step {
                values[j] = cont[j].max(intrinsic(spot(step, j)));
            }
        } else {
            values[..=step].copy_from_slice(&cont[..=step]);
        }
    }
    Ok(BoundaryTable::from_values(maturity, boundary))
}
