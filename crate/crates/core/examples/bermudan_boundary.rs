//! Exercise boundary of a Bermudan put: lattice reference, then a noisy search.

use std::sync::Arc;

use gpba::oracles::BermudanSetup;
use gpba::{run, BermudanPut, EstimatorKind, Oracle, PolicyKind, PolicySpec, RunConfig};

fn main() -> gpba::Result<()> {
    let setup = BermudanSetup { lattice_steps: 2_000, ..BermudanSetup::default() };
    let boundary = Arc::new(setup.boundary()?);
    for date in [1, 10, 20, 30, 40, 50] {
        println!("t = {:.2}  boundary {:.4}", boundary.time_of(date), boundary.at(date));
    }

    let mut put = BermudanPut::new(setup.clone(), Arc::clone(&boundary), 1)?;
    for s in [30.0, 34.0, 36.0, 38.0] {
        let n = 5_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += put.timing_value(s)?;
        }
        println!("mean timing value at S = {s}: {:+.4}", sum / n as f64);
    }

    let cfg = RunConfig::new(PolicySpec::new(PolicyKind::RandQ), EstimatorKind::Clt, 1000, 20_000);
    let out = run(&cfg, &mut put)?;
    let last = out.metrics.last().unwrap();
    println!(
        "search estimate {:.4} vs lattice {:.4} (ci length {:.4})",
        last.root_estimate,
        put.true_root().unwrap(),
        last.ci_length
    );
    Ok(())
}
