//! One search on a synthetic benchmark, with checkpoint metrics and the trace.
//!
//! `cargo run --example synthetic_search -- h2 syst-q mean 250`

use gpba::driver::write_trace;
use gpba::{run, EstimatorKind, PolicyKind, PolicySpec, RunConfig, SyntheticOracle, TestFunction};

fn main() -> gpba::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let func: TestFunction = arg(0, "h1").parse()?;
    let policy: PolicyKind = arg(1, "rand-q").parse()?;
    let estimator: EstimatorKind = arg(2, "clt").parse()?;
    let k: u32 = arg(3, "250").parse().expect("batch size");

    let mut cfg = RunConfig::new(PolicySpec::new(policy), estimator, k, 20_000);
    cfg.seed = 11;
    let out = run(&cfg, &mut SyntheticOracle::new(func, 3))?;

    println!("{func} {policy} {estimator} K={k}, root {}", func.root());
    println!("{:>8} {:>6} {:>10} {:>10} {:>10} {:>6}", "T", "n", "estimate", "residual", "ci_len", "cover");
    for m in &out.metrics {
        println!(
            "{:>8} {:>6} {:>10.5} {:>10.5} {:>10.5} {:>6}",
            m.checkpoint,
            m.n_macro,
            m.root_estimate,
            m.residual.unwrap_or(f64::NAN),
            m.ci_length,
            m.covered.unwrap_or(false)
        );
    }
    println!("\nfirst macro-iterations:");
    write_trace(&out.trace[..out.trace.len().min(5)], std::io::stdout())?;
    Ok(())
}
