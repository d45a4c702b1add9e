//! Certified zeros of a holomorphic function in a disc, with counting functions.

use valdist::cli::parse::parse_expression;
use valdist::nevanlinna::{find_zeros_with, winding_number_circle, ZeroSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_expression("(z - 1)^2 * (z + 2i) * (exp(z) - 3)")?;
    let ledger = find_zeros_with(&f, 6.0, ZeroSettings::default())?;
    println!("{} zeros (with multiplicity) in |z| < 6", ledger.multiplicity_sum());
    for rec in &ledger.records {
        println!(
            "  {:.10}  mult {}  certified {} (radius {:.1e})",
            rec.location, rec.multiplicity, rec.certified, rec.certificate_radius
        );
    }
    let w = winding_number_circle(&f, 0.0.into(), ledger.radius)?;
    println!("winding number on |z| = 6: {w}");
    for r in [2.0, 4.0, 6.0] {
        println!(
            "N({r}) = {:.6}  N_1({r}) = {:.6}",
            ledger.counting(r, None)?,
            ledger.counting(r, Some(1))?
        );
    }
    Ok(())
}
