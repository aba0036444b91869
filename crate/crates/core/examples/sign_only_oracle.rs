//! Sign-only responses: functional estimators are refused, count estimators work.

use gpba::oracles::{ConstantAccuracyOracle, SignOnly};
use gpba::{run, EstimatorKind, PolicyKind, PolicySpec, RunConfig, SyntheticOracle, TestFunction};

fn main() -> gpba::Result<()> {
    let mut signs = SignOnly(SyntheticOracle::new(TestFunction::H1, 4));
    let clt = RunConfig::new(PolicySpec::new(PolicyKind::SystQ), EstimatorKind::Clt, 100, 2_000);
    println!("clt on signs: {}", run(&clt, &mut signs).unwrap_err());

    let median = RunConfig { estimator: EstimatorKind::Median, ..clt };
    let out = run(&median, &mut signs)?;
    println!("median on signs: estimate {:.5}", out.metrics.last().unwrap().root_estimate);

    // Every response right with probability .9, whatever the distance to the root.
    let mut coin = ConstantAccuracyOracle::new(0.9, 0.25, (0.0, 1.0), 8)?;
    let cfg = RunConfig::new(PolicySpec::new(PolicyKind::Median), EstimatorKind::Exact, 10, 1_000);
    let out = run(&cfg, &mut coin)?;
    println!("constant coin: estimate {:.5}", out.metrics.last().unwrap().root_estimate);
    Ok(())
}
