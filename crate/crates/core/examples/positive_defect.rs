//! Builds curves of order 1 and 2 that approach a failing corner and measures
//! their defect.

use valdist::cli::run_positive_defect;
use valdist::cli::scenario::DivisorSpec;
use valdist::semitorus::{classify_finite_order, construct_positive_defect};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = [1.0, 2f64.sqrt()];
    for rho in [1, 2] {
        let built = construct_positive_defect(2, rho, &c, &[], true)?;
        let exps: Vec<String> = built.curve.exponents().iter().map(|e| e.to_string()).collect();
        println!("rho = {rho}: exponents {exps:?}, order {:?}", classify_finite_order(&built.curve));
        let divisor = DivisorSpec::product(vec![1, 2], &[(vec![1, 0], 1.0), (vec![0, 1], 1.0), (vec![0, 2], 1.0)]);
        let report = run_positive_defect(2, rho, &c, divisor)?;
        for check in &report.checks {
            println!("  {}", check.line());
        }
    }
    Ok(())
}
