//! Information-directed versus quantile sampling on the linear benchmark.

use gpba::harness::{run_experiment, ExperimentConfig};
use gpba::{EstimatorKind, PolicyKind, TestFunction};

fn main() -> gpba::Result<()> {
    let mut cfg = ExperimentConfig::synthetic(
        TestFunction::H1,
        vec![PolicyKind::DetIds, PolicyKind::RandIds, PolicyKind::RandQ, PolicyKind::SystQ],
        vec![EstimatorKind::Bar, EstimatorKind::Clt],
        vec![250],
        20_000,
    );
    cfg.reps = 40;
    cfg.checkpoints = vec![5_000, 20_000];
    let table = run_experiment(&cfg)?;

    println!("{:<22} {:>7} {:>12} {:>10} {:>9}", "scheme", "T", "residual", "ci_len", "coverage");
    for s in &table.summary {
        println!(
            "{:<22} {:>7} {:>12.6} {:>10.6} {:>8.1}%",
            s.scheme,
            s.t,
            s.mean_residual.unwrap_or(f64::NAN),
            s.mean_ci_len,
            100.0 * s.coverage.unwrap_or(0.0)
        );
    }
    Ok(())
}
