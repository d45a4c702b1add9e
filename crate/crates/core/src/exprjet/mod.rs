//! Expression grammar for entire and meromorphic functions of one variable.
//!
//! The grammar covers constants, `z`, sums, products, integer powers, `exp`
//! and quotients. That is enough for every curve in the crate: finite-order
//! curves into semi-tori are exactly `exp` of polynomials, and nested `exp`
//! gives infinite-order examples.
//!
//! Evaluation goes through [`Scaled`] numbers so that `log|e(z)|` stays finite
//! long after `|e(z)|` overflows. Taylor jets use the same representation.

mod expr;
mod scaled;

pub use expr::{Degree, Expression, Kind};
pub use scaled::{Scaled, ScaledJet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Highest supported jet order.
pub const MAX_JET_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("quotient denominator is identically zero")]
    ZeroDenominator,
    #[error("exp of a non-entire argument is not meromorphic")]
    NotMeromorphic,
    #[error("pole at z = {0}")]
    PoleAtPoint(Complex64),
    #[error("value overflows at z = {0}; use log_modulus")]
    Overflow(Complex64),
    #[error("function vanishes at z = {0}")]
    ZeroAtPoint(Complex64),
    #[error("jet order {0} exceeds the cap of {MAX_JET_ORDER}")]
    JetOrderTooLarge(usize),
    #[error("empty function family")]
    EmptyFamily,
}

/// Taylor coefficients `c_0..c_k` of an expression at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetSeries {
    pub base: Complex64,
    pub coefficients: Vec<Complex64>,
}

impl JetSeries {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `j`-th derivative at the base point, `j! * c_j`.
    pub fn derivative(&self, j: usize) -> Complex64 {
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        self.coefficients[j] * fact
    }

    /// Index of the first coefficient with modulus above `threshold`
    /// relative to the largest one; `None` if the jet is numerically zero.
    pub fn vanishing_order(&self, threshold: f64) -> Option<usize> {
        let scale = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        self.coefficients
            .iter()
            .position(|c| c.norm() > threshold * scale)
    }
}

impl Expression {
    /// Value in log-scaled form.
    pub fn eval_scaled(&self, z: Complex64) -> Result<Scaled, ExprError> {
        Ok(match self.kind() {
            Kind::Constant(c) => Scaled::new(*c),
            Kind::Variable => Scaled::new(z),
            Kind::Sum(terms) => {
                let mut acc = Scaled::ZERO;
                for t in terms {
                    acc = acc.add(t.eval_scaled(z)?);
                }
                acc
            }
            Kind::Product(factors) => {
                let mut acc = Scaled::new(Complex64::new(1.0, 0.0));
                for f in factors {
                    acc = acc.mul(f.eval_scaled(z)?);
                }
                acc
            }
            Kind::Power(b, k) => b
                .eval_scaled(z)?
                .powi(*k)
                .ok_or(ExprError::PoleAtPoint(z))?,
            Kind::Exp(a) => {
                let w = a.eval_scaled(z)?.to_complex();
                if !(w.re.is_finite() && w.im.is_finite()) {
                    return Err(ExprError::Overflow(z));
                }
                Scaled::exp_of(w)
            }
            Kind::Quotient(a, b) => {
                let den = b.eval_scaled(z)?;
                a.eval_scaled(z)?.div(den).ok_or(ExprError::PoleAtPoint(z))?
            }
        })
    }

    /// Truncated Taylor series at `a` in log-scaled form.
    pub fn scaled_jet(&self, a: Complex64, order: usize) -> Result<ScaledJet, ExprError> {
        Ok(match self.kind() {
            Kind::Constant(c) => ScaledJet::constant(*c, order),
            Kind::Variable => ScaledJet::variable(a, order),
            Kind::Sum(terms) => {
                let mut acc = ScaledJet::constant(Complex64::new(0.0, 0.0), order);
                for t in terms {
                    acc = acc.add(&t.scaled_jet(a, order)?);
                }
                acc
            }
            Kind::Product(factors) => {
                let mut acc = ScaledJet::constant(Complex64::new(1.0, 0.0), order);
                for f in factors {
                    acc = acc.mul(&f.scaled_jet(a, order)?);
                }
                acc
            }
            Kind::Power(b, k) => b
                .scaled_jet(a, order)?
                .powi(*k)
                .ok_or(ExprError::PoleAtPoint(a))?,
            Kind::Exp(arg) => arg
                .scaled_jet(a, order)?
                .exp()
                .ok_or(ExprError::Overflow(a))?,
            Kind::Quotient(n, d) => {
                let den = d.scaled_jet(a, order)?;
                n.scaled_jet(a, order)?
                    .div(&den)
                    .ok_or(ExprError::PoleAtPoint(a))?
            }
        })
    }

    /// Value and logarithmic derivative `e'(z)/e(z)`.
    pub fn value_and_log_derivative(&self, z: Complex64) -> Result<(Scaled, Complex64), ExprError> {
        let jet = self.scaled_jet(z, 1)?;
        let v = jet.coeffs[0];
        if v.re == 0.0 && v.im == 0.0 {
            return Err(ExprError::ZeroAtPoint(z));
        }
        Ok((jet.value(), jet.coeffs[1] / v))
    }

    /// Symbolic derivative with respect to `z`.
    pub fn differentiate(&self) -> Expression {
        match self.kind() {
            Kind::Constant(_) => Expression::real(0.0),
            Kind::Variable => Expression::real(1.0),
            Kind::Sum(terms) => Expression::sum(terms.iter().map(|t| t.differentiate()).collect()),
            Kind::Product(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for i in 0..factors.len() {
                    let d = factors[i].differentiate();
                    if d.is_zero_constant() {
                        continue;
                    }
                    let mut parts = Vec::with_capacity(factors.len());
                    for (j, f) in factors.iter().enumerate() {
                        parts.push(if i == j { d.clone() } else { f.clone() });
                    }
                    terms.push(Expression::product(parts));
                }
                Expression::sum(terms)
            }
            Kind::Power(b, k) => Expression::product(vec![
                Expression::real(*k as f64),
                Expression::power(b.clone(), k - 1),
                b.differentiate(),
            ]),
            Kind::Exp(a) => Expression::product(vec![a.differentiate(), self.clone()]),
            Kind::Quotient(a, b) => {
                let num = a.differentiate() * b.clone() - a.clone() * b.differentiate();
                Expression::quotient(num, Expression::power(b.clone(), 2))
                    .expect("square of a nonzero denominator is nonzero")
            }
        }
    }

    /// `k`-fold derivative.
    pub fn differentiate_n(&self, k: usize) -> Expression {
        (0..k).fold(self.clone(), |e, _| e.differentiate())
    }
}

/// Value of `e` at `z`.
pub fn evaluate(e: &Expression, z: Complex64) -> Result<Complex64, ExprError> {
    let v = e.eval_scaled(z)?.to_complex();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Overflow(z))
    }
}

/// `log|e(z)|`, computed without forming `|e(z)|`.
pub fn log_modulus(e: &Expression, z: Complex64) -> Result<f64, ExprError> {
    let v = e.eval_scaled(z)?;
    if v.is_zero() {
        return Err(ExprError::ZeroAtPoint(z));
    }
    Ok(v.ln_abs())
}

/// Taylor coefficients of `e` at `a` up to order `k`, by jet arithmetic.
pub fn jet(e: &Expression, a: Complex64, k: usize) -> Result<JetSeries, ExprError> {
    if k > MAX_JET_ORDER {
        return Err(ExprError::JetOrderTooLarge(k));
    }
    let coefficients = e
        .scaled_jet(a, k)?
        .to_plain()
        .ok_or(ExprError::Overflow(a))?;
    Ok(JetSeries {
        base: a,
        coefficients,
    })
}

pub fn differentiate(e: &Expression) -> Expression {
    e.differentiate()
}

pub fn polynomial_degree(e: &Expression) -> Option<Degree> {
    e.polynomial_degree()
}

/// Wronskian determinant `det[f_i^{(j)}(z)]`, rows `j = 0..l-1`.
pub fn wronskian(es: &[Expression], z: Complex64) -> Result<Complex64, ExprError> {
    let l = es.len();
    if l == 0 {
        return Err(ExprError::EmptyFamily);
    }
    let mut m = DMatrix::<Complex64>::zeros(l, l);
    for (i, e) in es.iter().enumerate() {
        let j = jet(e, z, l - 1)?;
        for row in 0..l {
            m[(row, i)] = j.derivative(row);
        }
    }
    Ok(m.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exponential_sum(m: f64, n: f64, cc: f64) -> Expression {
        Expression::exp(Expression::z())
            + Expression::exp_linear(m * cc)
            + Expression::exp_linear(n * cc)
    }

    #[test]
    fn evaluate_examples() {
        let z = Expression::z();
        assert_eq!(evaluate(&Expression::exp(z.clone()), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let v = evaluate(&exponential_sum(1.0, 2.0, 1.0 / SQRT_2), c(0.0, 0.0)).unwrap();
        assert!((v - c(3.0, 0.0)).norm() < 1e-15);
        let p = Expression::power(z, 2) + Expression::real(1.0);
        assert!(evaluate(&p, c(0.0, 1.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn evaluate_reports_pole_and_overflow() {
        let q = Expression::z().recip().unwrap();
        assert!(matches!(evaluate(&q, c(0.0, 0.0)), Err(ExprError::PoleAtPoint(_))));
        let big = Expression::exp(Expression::z());
        assert!(matches!(evaluate(&big, c(800.0, 0.0)), Err(ExprError::Overflow(_))));
    }

    #[test]
    fn log_modulus_examples() {
        let z = Expression::z();
        assert!((log_modulus(&Expression::exp(z.clone()), c(100.0, 0.0)).unwrap() - 100.0).abs() < 1e-12);
        let e2 = Expression::exp(Expression::power(z.clone(), 2));
        assert!((log_modulus(&e2, c(0.0, 10.0)).unwrap() + 100.0).abs() < 1e-12);
        // log|e^50 + e^100| = 100 + log(1 + e^-50)
        let s = Expression::exp(z.clone()) + Expression::exp_linear(2.0);
        let expect = 100.0 + (-50.0f64).exp().ln_1p();
        assert!((log_modulus(&s, c(50.0, 0.0)).unwrap() - expect).abs() < 1e-12);
        assert!(matches!(log_modulus(&z, c(0.0, 0.0)), Err(ExprError::ZeroAtPoint(_))));
    }

    #[test]
    fn differentiate_examples() {
        let z = Expression::z();
        let d = Expression::power(z.clone(), 3).differentiate();
        let p = d.polynomial_coefficients().unwrap();
        assert_eq!(p, &[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);

        let k = c(0.0, 2.0 * PI * 0.3);
        let e = Expression::exp_linear(k);
        let de = e.differentiate();
        for zz in [c(0.1, 0.2), c(-1.0, 0.5)] {
            let lhs = evaluate(&de, zz).unwrap();
            let rhs = k * evaluate(&e, zz).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }

        let cc = 1.0 / SQRT_2;
        let f = exponential_sum(1.0, 2.0, cc);
        let df = f.differentiate();
        let j = jet(&f, c(0.3, -0.7), 1).unwrap();
        assert!((evaluate(&df, c(0.3, -0.7)).unwrap() - j.coefficients[1]).norm() < 1e-12);
        let closed = Expression::exp(z.clone())
            + Expression::real(cc) * Expression::exp_linear(cc)
            + Expression::real(2.0 * cc) * Expression::exp_linear(2.0 * cc);
        assert!((evaluate(&df, c(1.1, 2.0)).unwrap() - evaluate(&closed, c(1.1, 2.0)).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn jet_examples() {
        let j = jet(&Expression::exp(Expression::z()), c(0.0, 0.0), 3).unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in j.coefficients.iter().zip(expect) {
            assert!((a - c(b, 0.0)).norm() < 1e-15);
        }
        let j = jet(&Expression::power(Expression::z(), 2), c(1.0, 0.0), 2).unwrap();
        for (a, b) in j.coefficients.iter().zip([1.0, 2.0, 1.0]) {
            assert!((a - c(b, 0.0)).norm() < 1e-15);
        }
        assert!(matches!(
            jet(&Expression::z(), c(0.0, 0.0), 65),
            Err(ExprError::JetOrderTooLarge(65))
        ));
    }

    #[test]
    fn wronskian_examples() {
        let one = Expression::real(1.0);
        let z = Expression::z();
        for at in [c(0.0, 0.0), c(2.0, -3.0)] {
            let w = wronskian(&[one.clone(), z.clone()], at).unwrap();
            assert!((w - c(1.0, 0.0)).norm() < 1e-15);
        }
        // Vandermonde oracle for exponentials at 0.
        let (a1, a2, a3) = (0.5, -1.25, 2.0);
        let es = [
            Expression::exp_linear(a1),
            Expression::exp_linear(a2),
            Expression::exp_linear(a3),
        ];
        let w = wronskian(&es, c(0.0, 0.0)).unwrap();
        let expect = (a2 - a1) * (a3 - a1) * (a3 - a2);
        assert!((w - c(expect, 0.0)).norm() < 1e-12);

        let cc = 1.0 / SQRT_2;
        let es = [
            Expression::exp(Expression::z()),
            Expression::exp_linear(cc),
            Expression::exp_linear(2.0 * cc),
        ];
        assert!(wronskian(&es, c(0.0, 0.0)).unwrap().norm() > 1e-3);
        assert!(matches!(wronskian(&[], c(0.0, 0.0)), Err(ExprError::EmptyFamily)));
    }

    #[test]
    fn degree_by_simplification_matches_high_order_jet() {
        let z = Expression::z();
        let z3 = Expression::power(z.clone(), 3);
        let e = (z3.clone() + z.clone()) - z3;
        assert_eq!(polynomial_degree(&e), Some(Degree::Finite(1)));
        let j = jet(&e, c(0.0, 0.0), 10).unwrap();
        let last_nonzero = j.coefficients.iter().rposition(|c| c.norm() > 1e-14);
        assert_eq!(last_nonzero, Some(1));
        assert_eq!(polynomial_degree(&Expression::exp(z)), None);
    }
}
