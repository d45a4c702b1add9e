//! Nevanlinna characteristic, proximity and counting functions of a
//! meromorphic function, with the Jensen residual as a consistency check.

use valdist::cli::parse::parse_expression;
use valdist::nevanlinna::{Meromorphic, QuadratureSettings, ZeroSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_expression("(exp(z) - 2) / (z + 3.5)")?;
    let q = QuadratureSettings::default();
    let g = Meromorphic::new(&f, 20.0, &ZeroSettings::default())?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}", "r", "T", "m", "N", "T(1/f)", "Jensen");
    for r in [2.0, 5.0, 10.0, 15.0, 20.0] {
        println!(
            "{r:>6.1} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>10.2e}",
            g.characteristic(r, &q)?,
            g.proximity(r, &q)?,
            g.pole_counting(r)?,
            g.characteristic_reciprocal(r, &q)?,
            g.jensen_residual(r, &q)?
        );
    }
    println!("T(r) ~ r/pi for large r: 20/pi = {:.6}", 20.0 / std::f64::consts::PI);
    Ok(())
}
