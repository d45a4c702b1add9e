//! Taylor jets, symbolic derivatives, polynomial degree and a Wronskian.

use num_complex::Complex64;
use valdist::cli::parse::parse_expression;
use valdist::exprjet::{differentiate, evaluate, jet, log_modulus, polynomial_degree, wronskian, Expression};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_expression("exp(z^2) + 3*z - 1")?;
    let at = Complex64::new(0.5, -0.25);
    let js = jet(&f, at, 4)?;
    for j in 0..=4 {
        println!("f^({j})({at}) = {:.10}", js.derivative(j));
    }
    let d = differentiate(&f);
    println!("symbolic f' at the same point = {:.10}", evaluate(&d, at)?);

    let huge = Complex64::new(900.0, 0.0);
    println!("log|f(900)| = {:.6} (no overflow)", log_modulus(&f, huge)?);

    let p = parse_expression("(z - 1)^3 * (z + 2) - z^4")?;
    println!("degree of (z-1)^3 (z+2) - z^4: {:?}", polynomial_degree(&p));
    println!("degree of z exp(z): {:?}", polynomial_degree(&(Expression::z() * Expression::exp(Expression::z()))));

    let c = 0.5f64.sqrt();
    let family = [Expression::real(1.0), Expression::exp(Expression::z()), Expression::exp_linear(c)];
    let w = wronskian(&family, Complex64::new(0.3, 0.1))?;
    println!("W(1, e^z, e^(cz)) at 0.3+0.1i = {w:.10}");
    Ok(())
}
