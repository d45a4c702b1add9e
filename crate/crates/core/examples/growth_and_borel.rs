//! Slope fits, order estimates and the exceptional set of the Borel lemma.

use valdist::cli::parse::parse_expression;
use valdist::nevanlinna::{borel_check, fit, nevanlinna_t, order_estimate, radius_grid, RegressionModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_expression("exp(z^2) + z")?;
    let grid = radius_grid(2.0, 20.0, 19, false);
    let mut samples = Vec::new();
    for &r in &grid {
        samples.push((r, nevanlinna_t(&f, r)?));
    }
    let order = order_estimate(&samples)?;
    println!("order estimate of exp(z^2) + z: {:.4}", order.slope);
    let quad = fit(&samples, RegressionModel::Power(2.0), None)?;
    println!("T(r) ~ {:.5} r^2 (1/pi = {:.5}), rms {:.2e}", quad.slope, 1.0 / std::f64::consts::PI, quad.residual_rms);

    let wide = radius_grid(1.0, 50.0, 200, false);
    let tame = borel_check(|r| r.exp(), &wide);
    println!("exp(r): {} violations over {} radii", tame.violations.len(), tame.checked);
    let steps = borel_check(|r| 3f64.powf(r.floor()), &radius_grid(1.0, 6.0, 2001, false));
    println!("3^floor(r): {} violations, measure {:.4} on [1, 6]", steps.violations.len(), steps.measure);
    Ok(())
}
