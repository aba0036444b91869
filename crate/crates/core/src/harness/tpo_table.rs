//! Hitting times of the power-one test at fixed accuracies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::with_pool;
use crate::error::Result;
use crate::numeric::norm_inv;
use crate::oracles::{SyntheticOracle, TestFunction};
use crate::policies::tpo_query;
use crate::seed::derive_seed;

/// Hard cap on a single test, far above any hitting time of interest.
const MAX_CALLS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpoCell {
    pub p: f64,
    pub alpha: f64,
    pub reps: u32,
    pub mean_k: f64,
    pub sd_k: f64,
    pub se_k: f64,
    /// Fraction of tests whose direction pointed toward the root.
    pub correct: f64,
}

/// Location left of the linear benchmark's root where one response has accuracy `p`.
pub fn location_for_accuracy(p: f64) -> f64 {
    let func = TestFunction::H1;
    func.root() - func.noise(0.0) * norm_inv(p)
}

/// Runs `reps` power-one tests for one `(p, alpha)` cell on the linear benchmark.
pub fn tpo_cell(p: f64, alpha: f64, reps: u32, seed: u64) -> Result<TpoCell> {
    let x = location_for_accuracy(p);
    let sigma = TestFunction::H1.noise(x);
    let runs: Vec<(u32, bool)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut oracle = SyntheticOracle::new(TestFunction::H1, derive_seed(seed, u64::from(rep)));
            let out = tpo_query(&mut oracle, x, sigma, alpha, MAX_CALLS)?;
            Ok((out.k_used, out.direction == crate::updating::Direction::Right))
        })
        .collect::<Result<_>>()?;
    let n = f64::from(reps);
    let mean = runs.iter().map(|&(k, _)| f64::from(k)).sum::<f64>() / n;
    let var = runs.iter().map(|&(k, _)| (f64::from(k) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(TpoCell {
        p,
        alpha,
        reps,
        mean_k: mean,
        sd_k: var.sqrt(),
        se_k: (var / n).sqrt(),
        correct: runs.iter().filter(|&&(_, c)| c).count() as f64 / n,
    })
}

/// The full `p × alpha` grid, each cell with its own seed stream.
pub fn tpo_table(ps: &[f64], alphas: &[f64], reps: u32, seed: u64, threads: usize) -> Result<Vec<TpoCell>> {
    with_pool(threads, || {
        let mut cells = Vec::new();
        for (i, &p) in ps.iter().enumerate() {
            for (j, &alpha) in alphas.iter().enumerate() {
                let cell_seed = derive_seed(seed, (i * alphas.len() + j) as u64);
                cells.push(tpo_cell(p, alpha, reps, cell_seed)?);
            }
        }
        Ok(cells)
    })?
}

pub fn write_tpo_table(cells: &[TpoCell], dir: &std::path::Path) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("tpo_table.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for c in cells {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::Oracle;

    #[test]
    fn location_has_requested_accuracy() {
        let oracle = SyntheticOracle::new(TestFunction::H1, 0);
        for p in [0.52, 0.55, 0.6, 0.7] {
            let x = location_for_accuracy(p);
            assert!((oracle.true_p(x).unwrap() - p).abs() < 1e-12);
            assert!(x < 1.0 / 3.0);
        }
    }

    #[test]
    fn easy_cell_is_fast_and_mostly_right() {
        let cell = tpo_cell(0.9, 0.05, 200, 1).unwrap();
        assert!(cell.mean_k < 20.0, "{cell:?}");
        assert!(cell.correct > 0.95);
    }
}
