use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::nevanlinna::radius_grid;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `-theta_1` from the Jacobi triple product.
fn product_formula(tau: Complex64, w: Complex64) -> Complex64 {
    let i = c(0.0, 1.0);
    let q = (i * PI * tau).exp();
    let mut acc = (i * PI * tau / 4.0).exp() * (w * PI).sin() * 2.0;
    let mut q2n = c(1.0, 0.0);
    for _ in 1..60 {
        q2n *= q * q;
        acc *= (1.0 - q2n) * (1.0 - q2n * (w * 2.0 * PI).cos() * 2.0 + q2n * q2n);
    }
    -acc
}

fn lattices() -> Vec<EllipticLattice> {
    vec![
        EllipticLattice::square(),
        EllipticLattice::new(c(0.3, 1.2)).unwrap(),
        EllipticLattice::new(c(-0.5, 0.6)).unwrap(),
    ]
}

#[test]
fn vanishes_on_the_lattice() {
    let l = EllipticLattice::square();
    assert!(theta_eval(&l, c(0.0, 0.0)).unwrap().norm() < 1e-12);
    assert!(theta_eval(&l, c(0.5, 0.5)).unwrap().norm() > 0.1);
    for (m, n) in [(1.0, 0.0), (0.0, 1.0), (-3.0, 2.0)] {
        assert!(l.theta(c(m, n)).unwrap().mantissa.norm() < 1e-12 || l.theta(c(m, n)).unwrap().is_zero());
    }
    assert!(EllipticLattice::new(c(1.0, 0.0)).is_err());
}

#[test]
fn agrees_with_the_triple_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for l in lattices() {
        for _ in 0..20 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let a = theta_eval(&l, z).unwrap();
            let b = product_formula(l.tau, z);
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-3), "{z}: {a} vs {b}");
        }
    }
}

#[test]
fn quasi_periodicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for l in lattices() {
        for _ in 0..20 {
            let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let t0 = l.theta(z).unwrap();
            let t1 = l.theta(z + 1.0).unwrap();
            let tt = l.theta(z + l.tau).unwrap();
            assert!((t1.ln_abs() - t0.ln_abs()).abs() < 1e-9);
            assert!((t1.to_complex_ratio(&t0) + 1.0).norm() < 1e-9);
            let shift = PI * l.tau.im + 2.0 * PI * z.im;
            assert!((tt.ln_abs() - t0.ln_abs() - shift).abs() < 1e-9);
            let n0 = l.log_norm(z).unwrap();
            assert!((l.log_norm(z + l.tau).unwrap() - n0).abs() < 1e-9);
            assert!((l.log_norm(z - l.tau * 3.0 + 2.0).unwrap() - n0).abs() < 1e-8);
        }
    }
}

trait Ratio {
    fn to_complex_ratio(&self, other: &Self) -> Complex64;
}

impl Ratio for crate::exprjet::Scaled {
    fn to_complex_ratio(&self, other: &Self) -> Complex64 {
        self.div(*other).unwrap().to_complex()
    }
}

#[test]
fn log_derivative_matches_difference_quotient() {
    let l = EllipticLattice::new(c(0.3, 1.2)).unwrap();
    let h = 1e-5;
    for z in [c(0.2, 0.1), c(3.3, -4.1), c(-7.2, 9.9)] {
        let (v, d) = l.theta_with_log_derivative(z).unwrap();
        let fwd = l.theta(z + h).unwrap().div(v).unwrap().to_complex();
        let bwd = l.theta(z - h).unwrap().div(v).unwrap().to_complex();
        let fd = (fwd - bwd) / (2.0 * h);
        assert!((fd - d.unwrap()).norm() < 1e-5 * (1.0 + fd.norm()), "{fd} vs {d:?}");
    }
}

fn brute_count(tau: Complex64, a: Complex64, b: Complex64, lo: f64, hi: f64) -> usize {
    let mut n = 0;
    for k in -200..=200 {
        for j in -200..=200 {
            let z = (tau * k as f64 + j as f64 - b) / a;
            let m = z.norm();
            if m > lo && m <= hi {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn ledger_matches_lattice_enumeration() {
    let curve = SubgroupCurve::new(vec![c(1.0, 0.0)], vec![c(0.5, 0.5)]).unwrap();
    let spec = ThetaDivisorSpec::single(EllipticLattice::square());
    let ledger = torus_counting(&curve, &spec, 10.0, &ZeroSettings::default()).unwrap();
    assert!(ledger.records.iter().all(|r| r.multiplicity == 1));
    for t in 0..10 {
        let (lo, hi) = (t as f64, t as f64 + 1.0);
        let got = ledger.records.iter().filter(|r| r.modulus > lo && r.modulus <= hi).count();
        assert_eq!(got, brute_count(c(0.0, 1.0), c(1.0, 0.0), c(0.5, 0.5), lo, hi), "annulus {t}");
    }
    let exact = lattice_zeros(&curve, &spec, 10.0);
    assert_eq!(exact.len(), ledger.records.len());
    for (r, z) in ledger.records.iter().zip(&exact) {
        assert!((r.modulus - z.norm()).abs() < 1e-8);
    }
}

#[test]
fn product_divisor_counts_both_factors() {
    let alpha = 2f64.sqrt();
    let curve = SubgroupCurve::new(vec![c(1.0, 0.0), c(alpha, 0.0)], vec![c(0.31, 0.17), c(0.23, 0.41)]).unwrap();
    let spec = ThetaDivisorSpec::product(vec![EllipticLattice::square(), EllipticLattice::square()]);
    let ledger = torus_counting(&curve, &spec, 6.0, &ZeroSettings::default()).unwrap();
    let expected = brute_count(c(0.0, 1.0), c(1.0, 0.0), c(0.31, 0.17), -1.0, 6.0)
        + brute_count(c(0.0, 1.0), c(alpha, 0.0), c(0.23, 0.41), -1.0, 6.0);
    assert_eq!(ledger.multiplicity_sum() as usize, expected);
    assert_eq!(lattice_zeros(&curve, &spec, 6.0).len(), expected);
}

#[test]
fn degenerate_curves_are_rejected() {
    assert!(matches!(
        SubgroupCurve::new(vec![c(0.0, 0.0)], vec![c(0.5, 0.5)]),
        Err(AbelianError::ConstantCurve)
    ));
    let curve = SubgroupCurve::new(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.5, 0.5), c(1.0, 1.0)]).unwrap();
    let spec = ThetaDivisorSpec::product(vec![EllipticLattice::square(), EllipticLattice::square()]);
    assert!(matches!(
        torus_counting(&curve, &spec, 3.0, &ZeroSettings::default()),
        Err(AbelianError::CurveInsideDivisor)
    ));
}

#[test]
fn quadratic_growth_and_scaling() {
    let spec = ThetaDivisorSpec::single(EllipticLattice::square());
    let curve = SubgroupCurve::new(vec![c(1.0, 0.0)], vec![c(0.5, 0.5)]).unwrap();
    let grid = radius_grid(5.0, 14.0, 12, false);
    let base = quadratic_law(&torus_counting(&curve, &spec, 14.0, &ZeroSettings::default()).unwrap(), &grid).unwrap();
    assert!((base.leading - PI / 2.0).abs() < 0.1 * PI / 2.0, "{}", base.leading);
    assert!(base.band_is_positive_and_finite());
    let doubled = curve.scaled(c(2.0, 0.0));
    let law = quadratic_law(&torus_counting(&doubled, &spec, 14.0, &ZeroSettings::default()).unwrap(), &grid).unwrap();
    assert!((law.leading / base.leading - 4.0).abs() < 0.2, "{}", law.leading / base.leading);
    assert!((expected_density(&doubled, &spec) - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn theta_divisor_has_no_defect_along_a_line() {
    let spec = ThetaDivisorSpec::single(EllipticLattice::square());
    let curve = SubgroupCurve::new(vec![c(1.0, 0.0)], vec![c(0.5, 0.5)]).unwrap();
    let ledger = torus_counting(&curve, &spec, 12.0, &ZeroSettings::default()).unwrap();
    let h = TorusPullback::new(curve, spec).unwrap();
    let grid = radius_grid(4.0, 12.0, 9, false);
    let d = torus_defect(&h, &ledger, &grid, &QuadratureSettings::default()).unwrap();
    assert!(d.delta.abs() < 0.05, "{d:?}");
    let spread = d.proximity.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
        - d.proximity.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    assert!(spread < 1.0, "{:?}", d.proximity);
}
