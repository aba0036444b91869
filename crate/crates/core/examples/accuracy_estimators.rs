//! Every accuracy estimator on the same batch.

use gpba::estimators::{posterior_mean, posterior_median, posterior_mode};
use gpba::estimators::{boost_majority, clamp_estimate, clt_prob, empirical_majority, exact_bias};
use gpba::oracles::query_batch;
use gpba::{Oracle, SyntheticOracle, TestFunction};

fn main() -> gpba::Result<()> {
    let mut oracle = SyntheticOracle::new(TestFunction::H1, 7);
    let (x, k) = (0.30, 100);
    let stats = query_batch(&mut oracle, x, k)?;
    let j = stats.minority();
    let true_p = oracle.true_p(x).unwrap();

    println!("x = {x}, K = {k}, right = {}, minority = {j}", stats.n_right);
    println!("{:<10} {:>8}", "estimator", "p");
    println!("{:<10} {:>8.4}", "true", true_p);
    println!("{:<10} {:>8.4}", "bar", empirical_majority(&stats));
    println!("{:<10} {:>8.4}", "mode", posterior_mode(j, k)?);
    println!("{:<10} {:>8.4}", "median", posterior_median(j, k)?);
    println!("{:<10} {:>8.4}", "mean", posterior_mean(j, k)?);
    let boosted = boost_majority(empirical_majority(&stats), k);
    println!("{:<10} {:>8.4}", "boost", clamp_estimate(boosted, k));
    let (p, dir) = clt_prob(&stats)?;
    println!("{:<10} {:>8.4}  ({dir:?})", "clt", clamp_estimate(p, k));

    // The empirical majority overstates p when few signs are seen.
    for k in [5, 11, 25] {
        println!("bias of bar at p = .6, K = {k:>2}: {:+.4}", exact_bias(0.6, k)?);
    }
    Ok(())
}
