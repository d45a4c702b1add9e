use num_complex::Complex64;
use proptest::prelude::*;

use valdist::divisor_analysis::stabilizer;
use valdist::exprjet::{differentiate, evaluate, jet, log_modulus, polynomial_degree, Expression};
use valdist::nevanlinna::{circle_mean, find_zeros_with, winding_number_circle, QuadratureSettings, ZeroSettings};
use valdist::semitorus::CompactifiedDivisor;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small_poly() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(-3i32..=3, 1..5)
}

fn nonzero_poly() -> impl Strategy<Value = Vec<i32>> {
    small_poly().prop_filter("nonzero", |p| p.iter().any(|&k| k != 0))
}

fn poly_expr(coeffs: &[i32]) -> Expression {
    let cs: Vec<Complex64> = coeffs.iter().map(|&k| c(k as f64, 0.0)).collect();
    Expression::polynomial(&cs)
}

fn left_fold(xs: &[Expression], add: bool) -> Expression {
    let mut acc = xs[0].clone();
    for x in &xs[1..] {
        acc = if add { acc + x.clone() } else { acc * x.clone() };
    }
    acc
}

fn right_fold(xs: &[Expression], add: bool) -> Expression {
    let mut acc = xs[xs.len() - 1].clone();
    for x in xs[..xs.len() - 1].iter().rev() {
        acc = if add { x.clone() + acc } else { x.clone() * acc };
    }
    acc
}

fn root() -> impl Strategy<Value = Complex64> {
    (0.0f64..4.5, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// Distinct roots with multiplicities 1..=3, total degree at most 8.
fn root_multiset() -> impl Strategy<Value = Vec<(Complex64, u32)>> {
    prop::collection::vec((root(), 1u32..=3), 1..6).prop_map(|mut rs| {
        let mut kept: Vec<(Complex64, u32)> = Vec::new();
        let mut degree = 0;
        for (z, m) in rs.drain(..) {
            if degree + m <= 8 && kept.iter().all(|(w, _)| (w - z).norm() > 0.05) {
                kept.push((z, m));
                degree += m;
            }
        }
        kept
    })
}

fn product_of_roots(roots: &[(Complex64, u32)]) -> Expression {
    let mut p = Expression::real(1.0);
    for (z, m) in roots {
        p = p * Expression::power(Expression::z() - Expression::constant(*z), *m as i32);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    #[test]
    fn degree_ignores_association(polys in prop::collection::vec(small_poly(), 2..5), add in any::<bool>()) {
        let xs: Vec<Expression> = polys.iter().map(|p| poly_expr(p)).collect();
        let mut rev = xs.clone();
        rev.reverse();
        let a = polynomial_degree(&left_fold(&xs, add));
        prop_assert_eq!(a, polynomial_degree(&right_fold(&xs, add)));
        prop_assert_eq!(a, polynomial_degree(&left_fold(&rev, add)));
    }

    #[test]
    fn exp_factor_is_not_polynomial(polys in prop::collection::vec(nonzero_poly(), 1..4)) {
        let mut xs: Vec<Expression> = polys.iter().map(|p| poly_expr(p)).collect();
        xs.push(Expression::exp(Expression::z()));
        prop_assert_eq!(polynomial_degree(&left_fold(&xs, false)), None);
        prop_assert_eq!(polynomial_degree(&right_fold(&xs, false)), None);
    }

    #[test]
    fn jet_matches_repeated_derivatives(
        a in -1.5f64..1.5, b in -1.5f64..1.5,
        x in -1.0f64..1.0, y in -1.0f64..1.0,
    ) {
        let e = Expression::exp(Expression::constant(c(a, b)) * Expression::z())
            + Expression::z() * Expression::z()
            + Expression::exp(Expression::z() * Expression::z());
        let at = c(x, y);
        let js = jet(&e, at, 5).unwrap();
        let mut d = e.clone();
        for j in 1..=5 {
            d = differentiate(&d);
            let exact = evaluate(&d, at).unwrap();
            prop_assert!((js.derivative(j) - exact).norm() <= 1e-8 * (1.0 + exact.norm()));
        }
    }

    #[test]
    fn log_modulus_matches_direct(x in -8.0f64..8.0, y in -8.0f64..8.0) {
        let e = Expression::exp(Expression::z()) + Expression::exp_linear(0.5f64.sqrt()) + Expression::real(2.0);
        let z = c(x, y);
        let direct = evaluate(&e, z).unwrap().norm().ln();
        prop_assert!((log_modulus(&e, z).unwrap() - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, .. ProptestConfig::default() })]

    #[test]
    fn ledger_recovers_known_roots(roots in root_multiset()) {
        let p = product_of_roots(&roots);
        let ledger = find_zeros_with(&p, 5.0, ZeroSettings::default()).unwrap();
        let total: u32 = roots.iter().map(|r| r.1).sum();
        prop_assert_eq!(ledger.multiplicity_sum(), total as u64);
        prop_assert_eq!(ledger.records.len(), roots.len());
        for rec in &ledger.records {
            let (z, m) = roots.iter().min_by(|a, b| (a.0 - rec.location).norm().total_cmp(&(b.0 - rec.location).norm())).unwrap();
            prop_assert!((z - rec.location).norm() < 1e-8);
            prop_assert_eq!(*m, rec.multiplicity);
        }
        let winding = winding_number_circle(&p, c(0.0, 0.0), ledger.radius).unwrap();
        prop_assert_eq!(winding, total as i64);
    }

    #[test]
    fn counting_is_monotone(roots in root_multiset(), r1 in 1.0f64..5.0, dr in 0.0f64..3.0) {
        let ledger = find_zeros_with(&product_of_roots(&roots), 8.0, ZeroSettings::default()).unwrap();
        let r2 = r1 + dr;
        for k in [Some(1), Some(2), Some(3), None] {
            prop_assert!(ledger.counting(r1, k).unwrap() <= ledger.counting(r2, k).unwrap() + 1e-12);
        }
        prop_assert!(ledger.counting(r2, Some(1)).unwrap() <= ledger.counting(r2, Some(2)).unwrap() + 1e-12);
        prop_assert!(ledger.counting(r2, Some(2)).unwrap() <= ledger.counting(r2, None).unwrap() + 1e-12);
    }

    #[test]
    fn circle_mean_of_log_distance(a in root(), r in 5.0f64..9.0) {
        // Mean of log|r e^{it} - a| over the circle is log r for |a| < r.
        let q = QuadratureSettings::default();
        let m = circle_mean(|t| (Complex64::from_polar(r, t) - a).norm().ln(), &q).unwrap();
        prop_assert!((m.value - r.ln()).abs() < 1e-7);
    }

    #[test]
    fn stabilizer_dimension_formula(
        support in prop::collection::btree_set((0u32..=2, 0u32..=2, 0u32..=2), 1..6),
    ) {
        let mut support = support;
        support.insert((0, 0, 0));
        let degree = |f: fn(&(u32, u32, u32)) -> u32| support.iter().map(f).max().unwrap();
        let multidegree = vec![degree(|t| t.0), degree(|t| t.1), degree(|t| t.2)];
        let terms: Vec<(Vec<u32>, Complex64)> = support
            .iter()
            .enumerate()
            .map(|(i, &(a, b, d))| (vec![a, b, d], c(1.0 + i as f64, 0.0)))
            .collect();
        let div = CompactifiedDivisor::product(multidegree, terms).unwrap();
        let st = stabilizer(&div);
        prop_assert_eq!(st.basis.len() + st.difference_rank, 3);
        prop_assert!(st.max_deviation <= 1e-8);
    }
}
