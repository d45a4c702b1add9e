//! Zeros of a theta function along a line in an elliptic curve: ledger against
//! exact lattice enumeration and the quadratic growth of the counting function.

use num_complex::Complex64;
use valdist::abelian::{
    expected_density, lattice_zeros, quadratic_law, torus_counting, EllipticLattice, SubgroupCurve, ThetaDivisorSpec,
};
use valdist::nevanlinna::{radius_grid, ZeroSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = EllipticLattice::square();
    let q = Complex64::new(0.3, 0.4);
    let a = lattice.theta(q)?;
    let b = lattice.theta(q + lattice.tau)?;
    println!("log|theta(z + tau)| - log|theta(z)| = {:.10}", b.ln_abs() - a.ln_abs());

    let curve = SubgroupCurve::new(vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(0.5, 0.5)])?;
    let spec = ThetaDivisorSpec::single(lattice);
    let radius = 12.0;
    let ledger = torus_counting(&curve, &spec, radius, &ZeroSettings::default())?;
    let exact = lattice_zeros(&curve, &spec, radius);
    println!("zeros in |z| < {radius}: ledger {}, lattice {}", ledger.multiplicity_sum(), exact.len());
    let law = quadratic_law(&ledger, &radius_grid(4.0, radius, 9, false))?;
    println!(
        "N(r) ~ {:.5} r^2, n(t)/t^2 in [{:.4}, {:.4}], expected rate {:.4}",
        law.leading,
        law.density_min,
        law.density_max,
        expected_density(&curve, &spec)
    );
    Ok(())
}
