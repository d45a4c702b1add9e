//! Corner test of the boundary condition, exact stabilizers, and hyperplane
//! arrangements in the plane.

use num_complex::Complex64;
use valdist::divisor_analysis::{analyze, general_position, hyperplane_scenario, stabilizer};
use valdist::semitorus::CompactifiedDivisor;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sum = CompactifiedDivisor::product(vec![1, 2], vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(1.0)), (vec![0, 2], c(1.0))])?;
    let a = analyze(&sum);
    println!("u1 + u2 + u2^2: boundary condition holds = {}", a.boundary_condition_holds);
    for corner in &a.corners {
        println!("  {} coefficient {} nonzero {}", corner.corner, corner.coefficient, corner.nonzero);
    }
    println!("  stabilizer basis {:?}", a.stabilizer_basis);

    let diag = CompactifiedDivisor::product(vec![1, 1], vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(-1.0))])?;
    println!("u1 - u2: stabilizer basis {:?}", stabilizer(&diag).basis);

    for h in [[c(1.0), c(2.0), c(-1.0)], [c(1.0), c(0.0), c(3.0)], [c(1.0), c(1.0), c(1.0)]] {
        let d = hyperplane_scenario(&h)?;
        println!(
            "line {:?}: boundary condition {}, general position {}",
            h.iter().map(|z| z.re).collect::<Vec<_>>(),
            analyze(&d).boundary_condition_holds,
            general_position(&h)
        );
    }
    Ok(())
}
