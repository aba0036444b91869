//! Sequential power-one test: hitting times, and a full search driven by it.

use gpba::harness::tpo_table::{location_for_accuracy, tpo_cell};
use gpba::{run, EstimatorKind, PolicyKind, PolicySpec, RunConfig, SyntheticOracle, TestFunction};

fn main() -> gpba::Result<()> {
    println!("{:>5} {:>6} {:>8} {:>8} {:>8}", "p", "alpha", "x", "mean K", "correct");
    for (p, alpha) in [(0.6, 0.05), (0.6, 0.4), (0.7, 0.05), (0.7, 0.4)] {
        let cell = tpo_cell(p, alpha, 300, 5)?;
        println!(
            "{p:>5} {alpha:>6} {:>8.4} {:>8.1} {:>8.3}",
            location_for_accuracy(p),
            cell.mean_k,
            cell.correct
        );
    }

    let mut spec = PolicySpec::new(PolicyKind::Tpo);
    spec.tpo_alpha = 0.4;
    let cfg = RunConfig::new(spec, EstimatorKind::Clt, 0, 20_000);
    let out = run(&cfg, &mut SyntheticOracle::new(TestFunction::H1, 9))?;
    let last = out.metrics.last().unwrap();
    println!(
        "\nsearch: {} tests, estimate {:.5}, residual {:.5}, covered {:?}",
        out.trace.len(),
        last.root_estimate,
        last.residual.unwrap(),
        last.covered.unwrap()
    );
    Ok(())
}
