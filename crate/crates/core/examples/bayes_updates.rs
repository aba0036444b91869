//! One batch of K signs applied at once versus one sign at a time.

use gpba::updating::{batched_update, step_update};
use gpba::{Direction, PiecewiseDensity, UpdateSignal};

fn main() -> gpba::Result<()> {
    let (x, p, k, right) = (0.3, 0.7, 12u32, 9u32);

    let mut batched = PiecewiseDensity::uniform(0.0, 1.0)?;
    batched_update(&mut batched, x, &UpdateSignal::Counts { n_right: right, k, accuracy: p })?;

    let mut seq = PiecewiseDensity::uniform(0.0, 1.0)?;
    for i in 0..k {
        let dir = if i < right { Direction::Right } else { Direction::Left };
        step_update(&mut seq, x, dir, p)?;
    }

    println!("batched  F(x) = {:.12}", batched.cdf(x));
    println!("sequence F(x) = {:.12}", seq.cdf(x));
    println!("gap            {:.2e}", (batched.cdf(x) - seq.cdf(x)).abs());

    // Boosted: a single majority vote with its own accuracy.
    let mut boosted = PiecewiseDensity::uniform(0.0, 1.0)?;
    UpdateSignal::Boosted { direction: Direction::Right, accuracy: 0.95 }.apply(&mut boosted, x)?;
    println!("boosted  F(x) = {:.6}", boosted.cdf(x));
    Ok(())
}
