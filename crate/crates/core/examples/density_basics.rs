//! Piecewise-constant knowledge state: split, query, serialize.

use gpba::PiecewiseDensity;

fn main() -> gpba::Result<()> {
    let mut f = PiecewiseDensity::uniform(0.0, 1.0)?;
    // Root twice as likely to the right of 0.4.
    f.apply_split_scaling(0.4, 2f64.ln(), 0.0)?;
    println!("intervals      {}", f.n_intervals());
    println!("mass           {:.12}", f.total_mass());
    println!("F(0.4)         {:.6}", f.cdf(0.4));
    println!("median         {:.6}", f.median());
    let (lo, hi) = f.credible_interval(0.05)?;
    println!("95% interval   [{lo:.4}, {hi:.4}]");

    let text = f.to_string();
    let back: PiecewiseDensity = text.parse()?;
    assert_eq!(back.knots(), f.knots());
    print!("{text}");
    Ok(())
}
