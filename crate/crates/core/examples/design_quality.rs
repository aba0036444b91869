//! Judge chosen query locations by the exact-accuracy posterior they induce.

use gpba::harness::run_design_quality;
use gpba::harness::ExperimentConfig;
use gpba::{EstimatorKind, PolicyKind, TestFunction};

fn main() -> gpba::Result<()> {
    let mut cfg = ExperimentConfig::synthetic(
        TestFunction::H2,
        vec![PolicyKind::RandQ, PolicyKind::DetIds],
        vec![EstimatorKind::Clt],
        vec![250],
        10_000,
    );
    cfg.reps = 20;
    cfg.checkpoints = vec![10_000];
    let table = run_design_quality(&cfg)?;
    for s in &table.summary {
        println!("{:<28} residual {:.6}  ci {:.6}", s.scheme, s.mean_residual.unwrap(), s.mean_ci_len);
    }
    Ok(())
}
