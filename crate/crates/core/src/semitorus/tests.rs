use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exprjet::Expression;
use crate::nevanlinna::{integrate, QuadratureSettings, ZeroSettings};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exponential_sum_divisor(m: u32, n: u32) -> CompactifiedDivisor {
    CompactifiedDivisor::product(
        vec![1, n],
        vec![
            (vec![1, 0], c(1.0, 0.0)),
            (vec![0, m], c(1.0, 0.0)),
            (vec![0, n], c(1.0, 0.0)),
        ],
    )
    .unwrap()
}

fn exponential_sum_curve(cc: f64) -> SemiTorusCurve {
    SemiTorusCurve::from_exponents(vec![Expression::z(), Expression::real(cc) * Expression::z()])
}

#[test]
fn single_exponential_order_function() {
    let q = QuadratureSettings::default();
    let k = c(0.7, -1.1);
    let curve = SemiTorusCurve::from_exponents(vec![Expression::constant(k) * Expression::z()]);
    for r in [3.0, 10.0, 25.0] {
        let t = order_function_t(&curve, r, &q).unwrap();
        assert!((t.t - k.norm() * r / PI).abs() < 1e-4, "{r}: {}", t.t);
        assert_eq!(t.t2, 0.0);
    }
}

#[test]
fn constant_curve_is_bounded() {
    let q = QuadratureSettings::default();
    let curve = SemiTorusCurve::from_exponents(vec![Expression::real(0.3), Expression::constant(c(1.0, 2.0))]);
    let t5 = order_function_t(&curve, 5.0, &q).unwrap().t;
    let t50 = order_function_t(&curve, 50.0, &q).unwrap().t;
    assert!((t5 - t50).abs() < 1e-6);
    assert_eq!(classify_finite_order(&curve), GrowthOrder::Finite(0));
}

#[test]
fn compact_part_matches_area_integral() {
    // (1/pi) int_0^r dt/t int_{|z|<t} sum |G'|^2 dA
    let q = QuadratureSettings::default();
    let fine = QuadratureSettings {
        abs_tol: 1e-9,
        initial_panels: 2,
        ..QuadratureSettings::default()
    };
    let samples = [
        vec![Expression::z()],
        vec![Expression::polynomial(&[c(1.0, 0.0), c(0.5, -0.2), c(0.0, 0.3)])],
        vec![Expression::z(), Expression::polynomial(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.2, 0.1)])],
    ];
    for g in samples {
        let r = 2.5;
        let derivs: Vec<Expression> = g.iter().map(|e| e.differentiate()).collect();
        let density = |z: Complex64| -> f64 {
            derivs
                .iter()
                .map(|d| crate::exprjet::evaluate(d, z).unwrap().norm_sqr())
                .sum::<f64>()
        };
        let disk = |t: f64| -> f64 {
            integrate(
                |s| s * integrate(|phi| density(Complex64::from_polar(s, phi)), 0.0, 2.0 * PI, &fine).unwrap().value,
                0.0,
                t,
                &fine,
            )
            .unwrap()
            .value
        };
        let oracle = integrate(|t| disk(t) / t / PI, 0.0, r, &q).unwrap().value;
        let curve = SemiTorusCurve::new(
            Presentation::new(0, g.len(), nalgebra::DMatrix::zeros(0, 2 * g.len()), lattice(g.len())).unwrap(),
            vec![],
            g,
        )
        .unwrap();
        let t2 = order_function_t(&curve, r, &fine).unwrap().t2;
        assert!((t2 - oracle).abs() < 1e-4, "{t2} vs {oracle}");
    }
}

fn lattice(m: usize) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(m, 2 * m, |i, j| {
        if j == i {
            c(1.0, 0.0)
        } else if j == i + m {
            c(0.3, 1.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

#[test]
fn presentation_shapes_are_checked() {
    let bad = Presentation::new(1, 1, nalgebra::DMatrix::zeros(1, 2), nalgebra::DMatrix::from_element(1, 2, c(1.0, 0.0)));
    assert!(matches!(bad, Err(SemiTorusError::InvalidPresentation(_))));
    let good = Presentation::new(1, 1, nalgebra::DMatrix::from_element(1, 2, 0.5), lattice(1)).unwrap();
    let gens = good.generators();
    assert_eq!(gens.shape(), (2, 3));
    assert_eq!(gens[(0, 0)], c(1.0, 0.0));
    assert_eq!(gens[(1, 0)], c(0.0, 0.0));
}

#[test]
fn order_classification() {
    let z = Expression::z();
    let curve = SemiTorusCurve::new(
        Presentation::new(1, 1, nalgebra::DMatrix::zeros(1, 2), lattice(1)).unwrap(),
        vec![z.clone() * z.clone()],
        vec![z.clone()],
    )
    .unwrap();
    assert_eq!(classify_finite_order(&curve), GrowthOrder::Finite(2));
    let nested = SemiTorusCurve::from_exponents(vec![Expression::exp(Expression::exp(z))]);
    assert_eq!(classify_finite_order(&nested), GrowthOrder::Infinite);
}

#[test]
fn divisibility_is_rejected() {
    let r = CompactifiedDivisor::product(vec![1], vec![(vec![1], c(1.0, 0.0))]);
    assert!(matches!(r, Err(SemiTorusError::ConstructionError(_))));
    let r = CompactifiedDivisor::product(vec![2], vec![(vec![0], c(1.0, 0.0)), (vec![1], c(1.0, 0.0))]);
    assert!(matches!(r, Err(SemiTorusError::ConstructionError(_))));
}

#[test]
fn section_norm_at_unit_point() {
    let n = 2;
    let d = exponential_sum_divisor(1, n);
    let v = d.section_norm(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let expect = 3f64.ln() - 0.5 * 2f64.ln() - (n as f64 / 2.0) * 2f64.ln();
    assert!((v - expect).abs() < 1e-14);
}

#[test]
fn section_norm_converges_towards_a_nonvanishing_corner() {
    let d = CompactifiedDivisor::product(
        vec![1, 1],
        vec![
            (vec![0, 0], c(1.0, 0.0)),
            (vec![1, 0], c(1.0, 0.0)),
            (vec![0, 1], c(1.0, 0.0)),
            (vec![1, 1], c(2.0, 0.0)),
        ],
    )
    .unwrap();
    let along = |t: f64| d.section_norm(&[c(t, 0.3 * t), c(-t, t)]).unwrap();
    let (a, b) = (along(1e6), along(1e9));
    assert!((a - b).abs() < 1e-5);
    let limit = 2f64.ln();
    assert!((b - limit).abs() < 1e-6);
}

#[test]
fn chart_inversions_agree() {
    let d = CompactifiedDivisor::product(
        vec![1, 3],
        vec![
            (vec![1, 0], c(1.0, 0.5)),
            (vec![0, 1], c(-2.0, 0.0)),
            (vec![0, 3], c(0.5, 0.0)),
            (vec![1, 2], c(0.0, 1.0)),
        ],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let u: Vec<Complex64> = (0..2)
            .map(|_| Complex64::from_polar((rng.gen_range(-3.0..3.0f64)).exp(), rng.gen_range(0.0..6.3)))
            .collect();
        let base = d.section_norm(&u).unwrap();
        for mask in [[true, false], [false, true], [true, true]] {
            let dd = d.inverted(&mask).unwrap();
            let v: Vec<Complex64> = u.iter().zip(mask).map(|(x, f)| if f { x.inv() } else { *x }).collect();
            let other = dd.section_norm(&v).unwrap();
            assert!((base - other).abs() < 1e-8, "{base} vs {other}");
        }
    }
}

#[test]
fn pullback_of_a_coordinate_level_set() {
    let d = CompactifiedDivisor::product(vec![1], vec![(vec![0], c(-2.0, 0.0)), (vec![1], c(1.0, 0.0))]).unwrap();
    let curve = SemiTorusCurve::from_exponents(vec![Expression::z()]);
    let ledger = pullback_ledger(&curve, &d, 15.0).unwrap();
    assert_eq!(ledger.records.len(), 5);
    for r in &ledger.records {
        let k = (r.location.im / (2.0 * PI)).round();
        assert!((r.location - c(2f64.ln(), 2.0 * PI * k)).norm() < 1e-9);
    }
}

#[test]
fn pullback_without_zeros() {
    let d = CompactifiedDivisor::product(vec![1], vec![(vec![0], c(1.0, 0.0)), (vec![1], c(1.0, 0.0))]).unwrap();
    let curve = SemiTorusCurve::from_exponents(vec![Expression::real(0.0)]);
    let ledger = pullback_ledger(&curve, &d, 20.0).unwrap();
    assert!(ledger.records.is_empty());
    assert_eq!(ledger.counting(10.0, None).unwrap(), 0.0);
}

#[test]
fn curve_inside_divisor() {
    let d = CompactifiedDivisor::product(vec![1, 1], vec![(vec![1, 0], c(1.0, 0.0)), (vec![0, 1], c(-1.0, 0.0))]).unwrap();
    let curve = SemiTorusCurve::from_exponents(vec![Expression::z(), Expression::z()]);
    assert!(matches!(pullback_ledger(&curve, &d, 5.0), Err(SemiTorusError::CurveInsideDivisor)));
}

#[test]
fn positive_defect_construction() {
    let built = construct_positive_defect(2, 1, &[1.0, 2f64.sqrt()], &[], false).unwrap();
    let v = built.curve.evaluate(c(0.5, 0.2)).unwrap();
    assert!((v[0] - c(0.5, 0.2).exp()).norm() < 1e-12);
    assert!((v[1] - (c(0.5, 0.2) * 2f64.sqrt()).exp()).norm() < 1e-12);
    assert!(built.notes.is_empty());
    assert!(matches!(
        construct_positive_defect(2, 1, &[1.0, 1.5], &[], false),
        Err(SemiTorusError::InvalidExponents(_))
    ));
    assert!(matches!(
        construct_positive_defect(2, 1, &[2.0, 1.0], &[], false),
        Err(SemiTorusError::InvalidExponents(_))
    ));
    assert!(matches!(
        construct_positive_defect(1, 0, &[1.0], &[], false),
        Err(SemiTorusError::InvalidExponents(_))
    ));
    let with_linear = construct_positive_defect(1, 2, &[1.0], &[Expression::z()], false).unwrap();
    assert_eq!(with_linear.notes.len(), 1);
    assert_eq!(classify_finite_order(&with_linear.curve), GrowthOrder::Finite(2));
}

#[test]
fn continued_fractions() {
    assert_eq!(rational_approximation(0.75, 1_000_000, 1e-13), Some((3, 4)));
    assert_eq!(rational_approximation(2f64.sqrt(), 1_000_000, 1e-13), None);
    assert_eq!(rational_approximation(355.0 / 113.0, 1_000_000, 1e-13), Some((355, 113)));
}

#[test]
fn first_main_theorem_for_the_exponential_sum() {
    let cc = 0.5f64.sqrt();
    let pairing = DivisorPairing::new(
        exponential_sum_curve(cc),
        exponential_sum_divisor(1, 2),
        36.0,
        &ZeroSettings::default(),
        QuadratureSettings::default(),
    )
    .unwrap();
    let mut res = Vec::new();
    for r in [15.0, 20.0, 25.0, 30.0, 35.0] {
        let t = pairing.order_t(r).unwrap();
        assert!((t - (1.0 + 2.0 * cc) / PI * r).abs() < 1e-5);
        res.push(pairing.fmt_residual(r).unwrap());
    }
    let band = res.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - res.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(band <= 0.5, "{res:?}");
}
