use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::*;
use crate::exprjet::Expression;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn from_roots(roots: &[Complex64]) -> Expression {
    Expression::product(roots.iter().map(|&a| Expression::z() - Expression::constant(a)).collect())
}

#[test]
fn simple_roots_of_a_polynomial() {
    let roots = [c(0.3, 0.1), c(-2.0, 1.5), c(4.0, -4.0), c(0.0, 7.5)];
    let ledger = find_zeros(&from_roots(&roots), 10.0, 1e-10).unwrap();
    assert_eq!(ledger.records.len(), 4);
    for a in roots {
        let rec = ledger.records.iter().find(|r| (r.location - a).norm() < 1e-9).unwrap();
        assert_eq!(rec.multiplicity, 1);
        assert!(rec.certified);
    }
}

#[test]
fn multiplicities_are_certified() {
    let f = Expression::power(Expression::z() - Expression::real(1.0), 2)
        * Expression::power(Expression::z() - Expression::constant(c(-1.0, 2.0)), 3);
    let ledger = find_zeros(&f, 5.0, 1e-10).unwrap();
    assert_eq!(ledger.records.len(), 2, "{:?}", ledger.records);
    assert_eq!(ledger.records[0].multiplicity, 2);
    assert_eq!(ledger.records[1].multiplicity, 3);
    assert_eq!(ledger.multiplicity_sum(), 5);
}

#[test]
fn zeros_of_exp_minus_one() {
    let f = Expression::exp(Expression::z()) - Expression::real(1.0);
    let ledger = find_zeros(&f, 20.0, 1e-10).unwrap();
    // 2 pi i k for |k| <= 3
    assert_eq!(ledger.records.len(), 7);
    for r in &ledger.records {
        let k = (r.location.im / TAU).round();
        assert!((r.location - c(0.0, TAU * k)).norm() < 1e-9);
    }
}

#[test]
fn boundary_zero_is_moved_off_the_circle() {
    let f = Expression::z() - Expression::real(3.0);
    let ledger = find_zeros(&f, 3.0, 1e-10).unwrap();
    assert!(ledger.perturbed);
    assert!(ledger.radius > 3.0);
    assert_eq!(ledger.records.len(), 1);
}

#[test]
fn circle_winding_counts_enclosed_zeros() {
    let f = from_roots(&[c(0.5, 0.0), c(0.0, 2.0), c(3.0, 3.0)]);
    assert_eq!(winding_number_circle(&f, c(0.0, 0.0), 1.0).unwrap(), 1);
    assert_eq!(winding_number_circle(&f, c(0.0, 0.0), 2.5).unwrap(), 2);
    assert_eq!(winding_number_circle(&f, c(0.0, 0.0), 5.0).unwrap(), 3);
}

#[test]
fn counting_function_examples() {
    let ledger = find_zeros(&(Expression::z() - Expression::real(2.0)), 5.0, 1e-10).unwrap();
    assert!((ledger.counting(4.0, None).unwrap() - 2f64.ln()).abs() < 1e-12);
    assert_eq!(ledger.counting(1.5, None).unwrap(), 0.0);
    assert!(matches!(
        ledger.counting(6.0, None),
        Err(ZeroError::RadiusExceedsLedger { .. })
    ));
    let f = Expression::power(Expression::z() - Expression::real(2.0), 3);
    let ledger = find_zeros(&f, 5.0, 1e-10).unwrap();
    let n = ledger.counting(4.0, None).unwrap();
    let n1 = ledger.counting(4.0, Some(1)).unwrap();
    assert!((n - 3.0 * 2f64.ln()).abs() < 1e-12);
    assert!((n1 - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn characteristic_examples() {
    let t = nevanlinna_t(&Expression::exp(Expression::z()), 10.0).unwrap();
    assert!((t - 10.0 / PI).abs() < 1e-6, "{t}");
    let f = Expression::quotient(Expression::real(1.0), Expression::z() - Expression::real(2.0)).unwrap();
    let t = nevanlinna_t(&f, 4.0).unwrap();
    assert!((t - 2f64.ln()).abs() < 1e-6, "{t}");
    let t = nevanlinna_t(&Expression::polynomial(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]), 5.0).unwrap();
    assert!((t - 3.0 * 5f64.ln()).abs() < 1e-6, "{t}");
}

#[test]
fn spherical_close_to_characteristic() {
    let s = spherical_t(&Expression::z(), 10.0).unwrap();
    assert!((s - 0.5 * 101f64.ln()).abs() < 1e-6);
    assert!((s - 10f64.ln()).abs() < 1.0);
}

#[test]
fn jensen_residual_vanishes() {
    let f = Expression::z() - Expression::real(0.5);
    assert!(jensen_residual(&f, 2.0).unwrap().abs() < 1e-6);
    let g = Expression::quotient(
        Expression::exp(Expression::z()) + Expression::real(2.0),
        from_roots(&[c(1.0, 1.0), c(-2.5, 0.3)]),
    )
    .unwrap();
    assert!(jensen_residual(&g, 6.0).unwrap().abs() < 1e-6);
    assert!(matches!(
        jensen_residual(&Expression::z(), 2.0),
        Err(NevanlinnaError::OriginOnDivisor)
    ));
}

#[test]
fn logarithmic_derivative_proximity() {
    let q = QuadratureSettings::default();
    assert!(logderiv_m(&Expression::exp(Expression::z()), 1, 50.0, &q).unwrap().abs() < 1e-12);
    let f = Expression::exp(Expression::z()) + Expression::real(1.0);
    for r in [10.0, 30.0, 60.0] {
        let m = logderiv_m(&f, 1, r, &q).unwrap();
        assert!(m <= 2.0 * r.ln() + 10.0);
    }
}

#[test]
fn max_modulus_of_exp() {
    let v = max_log_modulus(&Expression::exp(Expression::z()), 7.0, 256).unwrap();
    assert!((v - 7.0).abs() < 1e-9);
}
