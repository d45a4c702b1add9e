use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn product(d: Vec<u32>, terms: &[(&[u32], f64)]) -> CompactifiedDivisor {
    CompactifiedDivisor::product(d, terms.iter().map(|(l, a)| (l.to_vec(), c(*a))).collect()).unwrap()
}

#[test]
fn supports() {
    let d = product(vec![1, 1], &[(&[1, 0], 1.0), (&[0, 1], -1.0)]);
    assert_eq!(newton_support(&d), vec![vec![0, 1], vec![1, 0]]);
    let ex = product(vec![1, 3], &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[0, 3], 1.0)]);
    assert_eq!(newton_support(&ex), vec![vec![0, 1], vec![0, 3], vec![1, 0]]);
    let dense = product(vec![1, 1], &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 1.0)]);
    assert_eq!(newton_support(&dense).len(), 4);
}

#[test]
fn declared_zero_is_not_in_the_support() {
    let d = product(vec![1, 1], &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 0.0)]);
    assert_eq!(newton_support(&d).len(), 3);
    assert!(!analyze(&d).boundary_condition_holds);
}

#[test]
fn stabilizer_examples() {
    let diag = product(vec![1, 1], &[(&[1, 0], 1.0), (&[0, 1], -1.0)]);
    let st = stabilizer(&diag);
    assert_eq!(st.basis, vec![vec![1, 1]]);
    assert!(st.max_deviation <= 1e-8);

    let generic = product(vec![1, 1], &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0)]);
    assert!(stabilizer(&generic).basis.is_empty());

    let partial = product(vec![1, 0], &[(&[0, 0], 1.0), (&[1, 0], 1.0)]);
    let st = stabilizer(&partial);
    assert_eq!(st.basis, vec![vec![0, 1]]);
    assert_eq!(st.basis.len() + st.difference_rank, 2);
}

#[test]
fn exponential_sum_divisor_has_trivial_stabilizer_and_fails_at_the_origin_corner() {
    let ex = product(vec![1, 2], &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[0, 2], 1.0)]);
    let a = analyze(&ex);
    assert!(a.stabilizer_basis.is_empty());
    assert_eq!(a.difference_rank, 2);
    assert!(!a.boundary_condition_holds);
    let failing: Vec<&str> = a.corners.iter().filter(|c| !c.nonzero).map(|c| c.label.as_str()).collect();
    assert!(failing.contains(&"([1:0],[1:0])"));
    assert!(failing.contains(&"([0:1],[0:1])"));
    assert_eq!(failing.len(), 2);
}

#[test]
fn corner_examples() {
    // (1+u1)(1+u2)
    let d = product(vec![1, 1], &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 1.0)]);
    let a = analyze(&d);
    assert!(a.boundary_condition_holds);
    assert!(a.corners.iter().all(|c| c.coefficient == Complex64::new(1.0, 0.0)));
    assert!(boundary_restrictions(&d).iter().all(|f| f.terms > 0));

    let d = product(vec![1, 1], &[(&[0, 0], 1.0), (&[1, 1], 1.0)]);
    let failing: Vec<Corner> = boundary_condition(&d).into_iter().filter(|c| !c.nonzero).map(|c| c.corner).collect();
    assert_eq!(
        failing,
        vec![
            Corner::Product(vec![End::Infinity, End::Zero]),
            Corner::Product(vec![End::Zero, End::Infinity])
        ]
    );
}

#[test]
fn failing_corner_drives_the_norm_to_minus_infinity() {
    let d = product(vec![1, 1], &[(&[0, 0], 1.0), (&[1, 1], 1.0)]);
    let corner = [End::Infinity, End::Zero];
    let base = [Complex64::new(0.7, 0.2), Complex64::new(-0.4, 1.1)];
    let values: Vec<f64> = [1e1, 1e2, 1e3, 1e4, 1e5]
        .iter()
        .map(|t| d.section_norm(&corner_ray(&corner, &base, *t)).unwrap())
        .collect();
    for w in values.windows(2) {
        assert!(w[1] < w[0] - 1.0, "{values:?}");
    }
}

#[test]
fn hyperplane_examples() {
    let d = hyperplane_scenario(&[c(1.0), c(1.0), c(1.0)]).unwrap();
    assert!(analyze(&d).boundary_condition_holds);
    assert!(general_position(&[c(1.0), c(1.0), c(1.0)]));

    let d = hyperplane_scenario(&[c(0.0), c(1.0), c(1.0)]).unwrap();
    let a = analyze(&d);
    assert!(!a.boundary_condition_holds);
    assert_eq!(a.corners.iter().filter(|c| !c.nonzero).count(), 1);
    assert_eq!(a.corners[0].label, "[1:0:0]");
    assert!(!general_position(&[c(0.0), c(1.0), c(1.0)]));

    let d = hyperplane_scenario(&[c(1.0), c(-1.0)]).unwrap();
    assert!(analyze(&d).boundary_condition_holds);

    assert!(matches!(
        hyperplane_scenario(&[c(0.0), c(3.0), c(0.0)]),
        Err(DivisorError::DegenerateHyperplane)
    ));
}

#[test]
fn corner_test_agrees_with_general_position() {
    let mut rng = ChaCha8Rng::seed_from_u64(413);
    let mut checked = 0;
    while checked < 50 {
        let a: Vec<Complex64> = (0..3).map(|_| c(rng.gen_range(-2..=2) as f64)).collect();
        let Ok(d) = hyperplane_scenario(&a) else { continue };
        assert_eq!(analyze(&d).boundary_condition_holds, general_position(&a), "{a:?}");
        checked += 1;
    }
}
