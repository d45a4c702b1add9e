//! Invariant suite at reduced scale, and the analysis-layer property suite.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::parse::parse_expression;
use super::report::{Check, Report};
use crate::abelian::{lattice_zeros, torus_counting, EllipticLattice, SubgroupCurve, ThetaDivisorSpec};
use crate::divisor_analysis::{analyze, general_position, hyperplane_scenario, stabilizer};
use crate::exprjet::Expression;
use crate::nevanlinna::{
    borel_check, find_zeros_with, fit, integrate, logderiv_m, max_log_modulus, proximity_m, radius_grid,
    Meromorphic, ProximityMode, QuadratureSettings, RegressionModel, ZeroSettings,
};
use crate::semitorus::{CompactifiedDivisor, DivisorPairing, SemiTorusCurve};

/// Size of the analysis suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SuiteScale {
    Reduced,
    Full,
}

/// Functions with `F(0) != 0, inf` and the radius at which their Jensen
/// residual is checked.
pub const JENSEN_CORPUS: [(&str, f64); 10] = [
    ("z-4.9", 5.0),
    ("(z-1)*(z-2)/(z-3)", 5.0),
    ("exp(z)", 10.0),
    ("exp(z)+exp(0.7071067811865476*z)+exp(1.4142135623730951*z)", 10.0),
    ("poly([1, 2, 3, 4])", 5.0),
    ("(exp(z)-2)/(z+3.5)", 5.0),
    ("exp(z^2)-0.5", 3.0),
    ("z-0.5+0.5i", 5.0),
    ("(z^2+1)/(z^2-4)", 5.0),
    ("exp(2*z)-3", 4.0),
];

/// Quotients for the check `T(r, F) = T(r, 1/F) + O(1)`.
pub const QUOTIENT_CORPUS: [&str; 10] = [
    "(z-1)/(z+2)",
    "exp(z)",
    "exp(z)/(z-3)",
    "(z^2+1)/(z-0.5i)",
    "(exp(z)+1)/(exp(z)-2)",
    "z^3-8",
    "(z-2)*(z+2.5)/(z^2+9)",
    "exp(0.5*z)+z",
    "1/(z-1.5)",
    "exp(-z)*(z+4)",
];

fn jensen_check(q: &QuadratureSettings) -> Check {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (text, r) in JENSEN_CORPUS {
        let f = parse_expression(text).expect("corpus parses");
        let res = Meromorphic::new(&f, r, &ZeroSettings::default()).and_then(|m| m.jensen_residual(r, q));
        match res {
            Ok(v) => {
                if v.abs() > 1e-5 {
                    failures.push(format!("{text}: {v:.3e}"));
                }
                worst = worst.max(v.abs());
            }
            Err(e) => {
                failures.push(format!("{text}: {e}"));
                worst = f64::INFINITY;
            }
        }
    }
    let c = Check::at_most("Jensen residual on the corpus", worst, 1e-5);
    if failures.is_empty() {
        c
    } else {
        c.with_detail(failures.join("; "))
    }
}

fn reciprocal_check(scale: SuiteScale, q: &QuadratureSettings) -> Check {
    let (rmax, steps, count) = match scale {
        SuiteScale::Reduced => (20.0, 6, 4),
        SuiteScale::Full => (40.0, 10, 10),
    };
    let grid = radius_grid(5.0, rmax, steps, false);
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for text in QUOTIENT_CORPUS.iter().take(count) {
        let f = parse_expression(text).expect("corpus parses");
        let run = || -> Result<f64, crate::nevanlinna::NevanlinnaError> {
            let m = Meromorphic::new(&f, rmax, &ZeroSettings::default())?;
            let diff: Vec<(f64, f64)> = grid
                .iter()
                .map(|&r| Ok((r, m.characteristic(r, q)? - m.characteristic_reciprocal(r, q)?)))
                .collect::<Result<_, crate::nevanlinna::NevanlinnaError>>()?;
            Ok(fit(&diff, RegressionModel::Power(1.0), None)?.slope.abs())
        };
        match run() {
            Ok(s) => {
                worst = worst.max(s);
                details.push(format!("{text}: {s:.2e}"));
            }
            Err(e) => {
                worst = f64::INFINITY;
                details.push(format!("{text}: {e}"));
            }
        }
    }
    Check::at_most("T(r,F) - T(r,1/F) de-trended slope", worst, 0.01).with_detail(details.join("; "))
}

fn product_rule_check(q: &QuadratureSettings) -> Check {
    let pairs = [("exp(z)", "z-2"), ("(z-1)/(z+3)", "exp(0.5*z)"), ("z^2+1", "1/(z-2.5)")];
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in pairs {
        let fa = parse_expression(a).unwrap();
        let fb = parse_expression(b).unwrap();
        let prod = fa.clone() * fb.clone();
        for r in [4.0, 8.0, 16.0] {
            let t = |f: &Expression| Meromorphic::new(f, r, &ZeroSettings::default()).and_then(|m| m.characteristic(r, q));
            match (t(&prod), t(&fa), t(&fb)) {
                (Ok(p), Ok(x), Ok(y)) => worst = worst.max(p - x - y),
                _ => worst = f64::INFINITY,
            }
        }
    }
    Check::at_most("T(r,F1 F2) - T(r,F1) - T(r,F2)", worst, 0.01)
}

fn poisson_bound_check(q: &QuadratureSettings) -> Check {
    let mut worst = f64::NEG_INFINITY;
    for text in ["exp(z)", "exp(z^2)"] {
        let f = parse_expression(text).unwrap();
        for big in [2.0, 4.0, 8.0] {
            let r = big / 2.0;
            let lhs = max_log_modulus(&f, r, 256);
            let m = proximity_m(&f, big, &ProximityMode::LogPlus, q);
            match (lhs, m) {
                (Ok(l), Ok(m)) => worst = worst.max(l - (big + r) / (big - r) * m.value),
                _ => worst = f64::INFINITY,
            }
        }
    }
    Check::at_most("max log|F| - (R+r)/(R-r) m(R,F)", worst, 1e-6)
}

fn logderiv_check(q: &QuadratureSettings) -> (Check, f64) {
    let f = parse_expression("exp(z)+1").unwrap();
    let mut c_max: f64 = 0.0;
    for r in [10.0, 20.0, 40.0] {
        match logderiv_m(&f, 1, r, q) {
            Ok(v) => c_max = c_max.max(v / r.ln()),
            Err(_) => c_max = f64::INFINITY,
        }
    }
    (
        Check::at_most("m(r, F'/F) / log r", c_max, 5.0).with_detail(format!("C = {c_max:.4}")),
        c_max,
    )
}

fn borel_checks(q: &QuadratureSettings) -> Vec<Check> {
    let grid: Vec<f64> = (0..=980).map(|i| 2.0 + 0.1 * i as f64).collect();
    let a = borel_check(|r| r, &grid);
    let grid_e: Vec<f64> = (0..=490).map(|i| 1.0 + 0.1 * i as f64).collect();
    let b = borel_check(|r: f64| r.exp(), &grid_e);
    let cc = 0.5f64.sqrt();
    let curve = SemiTorusCurve::from_exponents(vec![Expression::z(), Expression::real(cc) * Expression::z()]);
    let t = |r: f64| crate::semitorus::order_function_t(&curve, r, q).map(|o| o.t).unwrap_or(f64::NAN);
    let grid_t: Vec<f64> = (0..=76).map(|i| 2.0 + 0.5 * i as f64).collect();
    let c = borel_check(t, &grid_t);
    vec![
        Check::close("Borel violations for r", a.measure, 0.0, 0.0),
        Check::close("Borel violations for exp(r)", b.measure, 0.0, 0.0),
        Check::at_most("Borel violation measure for a measured T", c.measure, 0.5),
    ]
}

/// Random polynomials with known roots; exact multiset recovery.
pub fn zero_finder_check(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..count {
        let degree = rng.gen_range(1..=8usize);
        let mut roots: Vec<Complex64> = Vec::new();
        while roots.len() < degree {
            let z = Complex64::from_polar(rng.gen_range(0.0..4.5), rng.gen_range(0.0..std::f64::consts::TAU));
            let mult = if rng.gen_bool(0.25) { 2 } else { 1 }.min(degree - roots.len());
            if roots.iter().all(|w| (w - z).norm() > 0.05) {
                roots.extend(std::iter::repeat(z).take(mult));
            }
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        let p = Expression::polynomial(&coeffs);
        match find_zeros_with(&p, 5.0, ZeroSettings::default()) {
            Ok(ledger) => {
                let mut ok = ledger.multiplicity_sum() == degree as u64;
                for rec in &ledger.records {
                    let expected = roots.iter().filter(|w| (*w - rec.location).norm() < 1e-5).count();
                    ok &= expected == rec.multiplicity as usize;
                }
                if !ok {
                    failures.push(format!("case {case}"));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    Check::close(
        "zero finder recovers known roots",
        failures.len() as f64,
        0.0,
        0.0,
    )
    .with_detail(if failures.is_empty() {
        format!("{count} polynomials")
    } else {
        failures.join("; ")
    })
}

fn monotonicity_check() -> Check {
    let f = parse_expression("exp(z)+exp(0.7071067811865476*z)+exp(1.4142135623730951*z)").unwrap();
    let ledger = match find_zeros_with(&f, 30.0, ZeroSettings::default()) {
        Ok(l) => l,
        Err(e) => return Check::flag("counting functions are monotone", false, e.to_string()),
    };
    let grid = radius_grid(1.0, 30.0, 40, false);
    let mut ok = true;
    let mut prev = vec![f64::NEG_INFINITY; 3];
    for r in grid {
        let vals: Vec<f64> = [Some(1), Some(2), None]
            .iter()
            .map(|k| ledger.counting(r, *k).unwrap_or(f64::NAN))
            .collect();
        ok &= vals.windows(2).all(|w| w[0] <= w[1] + 1e-12);
        ok &= vals.iter().zip(&prev).all(|(v, p)| *v >= *p - 1e-12);
        prev = vals;
    }
    Check::flag("counting functions are monotone", ok, "in r and in k")
}

/// The property suite for the analysis layer.
pub fn analysis_suite(scale: SuiteScale, q: &QuadratureSettings) -> Report {
    let mut report = Report::new("analysis", &(scale, q));
    report.check(jensen_check(q));
    report.check(reciprocal_check(scale, q));
    report.check(product_rule_check(q));
    report.check(poisson_bound_check(q));
    let (c, cmax) = logderiv_check(q);
    report.check(c);
    report.verdict("logderiv_constant", cmax);
    for c in borel_checks(q) {
        report.check(c);
    }
    let count = match scale {
        SuiteScale::Reduced => 12,
        SuiteScale::Full => 50,
    };
    report.check(zero_finder_check(count, 20240601));
    report.check(monotonicity_check());
    let quad = integrate(|x| x.ln(), 0.0, 1.0, q).map(|i| i.value).unwrap_or(f64::NAN);
    report.check(Check::close("integral of log x on [0,1]", quad, -1.0, 1e-6));
    report
}

fn theta_checks() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = EllipticLattice::new(Complex64::new(0.2, 1.1)).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a = l.theta(z).unwrap().ln_abs();
        let b = l.theta(z + 1.0).unwrap().ln_abs();
        let c = l.theta(z + l.tau).unwrap().ln_abs();
        worst = worst.max((a - b).abs()).max((c - a - PI * l.tau.im - 2.0 * PI * z.im).abs());
    }
    let curve = SubgroupCurve::new(vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(0.5, 0.5)]).unwrap();
    let spec = ThetaDivisorSpec::single(EllipticLattice::square());
    let counted = torus_counting(&curve, &spec, 10.0, &ZeroSettings::default())
        .map(|l| l.multiplicity_sum() as f64)
        .unwrap_or(f64::NAN);
    let exact = lattice_zeros(&curve, &spec, 10.0).len() as f64;
    vec![
        Check::at_most("theta quasi-periodicity", worst, 1e-9),
        Check::close("theta pullback count equals lattice count", counted, exact, 0.0),
    ]
}

fn combinatorics_checks() -> Vec<Check> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let ex = CompactifiedDivisor::product(
        vec![1, 2],
        vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(1.0)), (vec![0, 2], c(1.0))],
    )
    .unwrap();
    let a = analyze(&ex);
    let diag = CompactifiedDivisor::product(vec![1, 1], vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(-1.0))]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut agree = 0;
    let mut total = 0;
    while total < 50 {
        let h: Vec<Complex64> = (0..3).map(|_| c(rng.gen_range(-2..=2) as f64)).collect();
        if let Ok(d) = hyperplane_scenario(&h) {
            total += 1;
            agree += (analyze(&d).boundary_condition_holds == general_position(&h)) as usize;
        }
    }
    vec![
        Check::flag(
            "exponential-sum divisor fails the boundary condition with trivial stabilizer",
            !a.boundary_condition_holds && a.stabilizer_basis.is_empty(),
            format!("{} failing corners", a.corners.iter().filter(|c| !c.nonzero).count()),
        ),
        Check::flag(
            "diagonal stabilizer",
            stabilizer(&diag).basis == vec![vec![1, 1]],
            format!("{:?}", stabilizer(&diag).basis),
        ),
        Check::close("hyperplane agreement", agree as f64 / total as f64, 1.0, 0.0),
    ]
}

fn pairing_checks(q: &QuadratureSettings) -> Vec<Check> {
    let cc = 0.5f64.sqrt();
    let curve = SemiTorusCurve::from_exponents(vec![Expression::z(), Expression::real(cc) * Expression::z()]);
    let c = |x: f64| Complex64::new(x, 0.0);
    let d = CompactifiedDivisor::product(
        vec![1, 2],
        vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(1.0)), (vec![0, 2], c(1.0))],
    )
    .unwrap();
    let pairing = match DivisorPairing::new(curve, d, 25.0, &ZeroSettings::default(), *q) {
        Ok(p) => p,
        Err(e) => return vec![Check::flag("exponential-sum pairing", false, e.to_string())],
    };
    let grid = radius_grid(10.0, 25.0, 8, true);
    match pairing.table(&grid, &[1]) {
        Ok(table) => {
            let t = fit(&table.column("T").unwrap(), RegressionModel::Power(1.0), None)
                .map(|f| f.slope)
                .unwrap_or(f64::NAN);
            let res: Vec<f64> = table.rows.iter().map(|r| r.residual).collect();
            let spread = res.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - res.iter().cloned().fold(f64::INFINITY, f64::min);
            vec![
                Check::relative("exponential-sum T slope", t, (1.0 + 2.0 * cc) / PI, 0.02),
                Check::at_most("exponential-sum residual band", spread, 0.5),
            ]
        }
        Err(e) => vec![Check::flag("exponential-sum pairing", false, e.to_string())],
    }
}

/// Every module's invariants at reduced scale.
pub fn run_selftest() -> Report {
    run_selftest_with(&QuadratureSettings::default())
}

/// [`run_selftest`] with the quadrature settings replaced, for fault injection.
pub fn run_selftest_with(q: &QuadratureSettings) -> Report {
    let mut report = Report::new("selftest", q);
    report.absorb("analysis", analysis_suite(SuiteScale::Reduced, q));
    for c in theta_checks() {
        report.check(c);
    }
    for c in combinatorics_checks() {
        report.check(c);
    }
    for c in pairing_checks(q) {
        report.check(c);
    }
    report
}
