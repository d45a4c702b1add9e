//! A curve in a semi-torus whose divisor violates the boundary condition:
//! characteristic table, slopes and a positive defect.

use std::f64::consts::PI;

use num_complex::Complex64;
use valdist::exprjet::Expression;
use valdist::nevanlinna::{radius_grid, QuadratureSettings, ZeroSettings};
use valdist::semitorus::{CompactifiedDivisor, DivisorPairing, SemiTorusCurve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (m, n, c) = (1.0, 2.0, 0.5f64.sqrt());
    let curve = SemiTorusCurve::from_exponents(vec![Expression::z(), Expression::real(c) * Expression::z()]);
    let one = Complex64::new(1.0, 0.0);
    let divisor = CompactifiedDivisor::product(
        vec![1, 2],
        vec![(vec![1, 0], one), (vec![0, 1], one), (vec![0, 2], one)],
    )?;
    let pairing = DivisorPairing::new(curve, divisor, 40.0, &ZeroSettings::default(), QuadratureSettings::default())?;
    let table = pairing.table(&radius_grid(5.0, 40.0, 26, false), &[1])?;
    for row in table.rows.iter().step_by(5) {
        println!("r = {:5.1}  T = {:9.4}  m = {:9.4}  N = {:9.4}  residual = {:.2e}", row.r, row.t, row.m, row.n, row.residual);
    }
    let d = pairing.defect(&table, None, Some((15.0, 40.0)))?;
    println!("T slope {:.5} (expected {:.5})", d.t_fit.slope, (1.0 + n * c) / PI);
    println!("N slope {:.5} (expected {:.5})", d.n_fit.slope, (n - m) * c / PI);
    println!("defect {:.4}, band [{:.4}, {:.4}], expected {:.4}", d.value, d.band.0, d.band.1, (1.0 + m * c) / (1.0 + n * c));
    Ok(())
}
