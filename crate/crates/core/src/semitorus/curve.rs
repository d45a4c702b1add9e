use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SemiTorusError;
use crate::exprjet::{Degree, Expression};
use crate::nevanlinna::{circle_mean, proximity_m, ProximityMode, QuadratureSettings};

/// Lattice presentation of a semi-torus `(C*)^p -> M -> M_0`.
///
/// The lattice in `C^{p+m}` is generated by the columns of
/// `[[I_p, A], [0, B]]` with `A` a real `p x 2m` block and `B` a complex
/// `m x 2m` block whose columns span `C^m` over the reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub p: usize,
    pub m: usize,
    pub a: DMatrix<f64>,
    pub b: DMatrix<Complex64>,
}

impl Presentation {
    /// `(C*)^p`, no compact part.
    pub fn multiplicative(p: usize) -> Presentation {
        Presentation {
            p,
            m: 0,
            a: DMatrix::zeros(p, 0),
            b: DMatrix::zeros(0, 0),
        }
    }

    pub fn new(p: usize, m: usize, a: DMatrix<f64>, b: DMatrix<Complex64>) -> Result<Presentation, SemiTorusError> {
        if a.shape() != (p, 2 * m) || b.shape() != (m, 2 * m) {
            return Err(SemiTorusError::InvalidPresentation(format!(
                "expected A of shape {p}x{} and B of shape {m}x{}",
                2 * m,
                2 * m
            )));
        }
        if m > 0 {
            let real = DMatrix::from_fn(2 * m, 2 * m, |i, j| {
                if i < m {
                    b[(i, j)].re
                } else {
                    b[(i - m, j)].im
                }
            });
            if real.determinant().abs() < 1e-12 {
                return Err(SemiTorusError::InvalidPresentation(
                    "columns of B do not span a lattice".into(),
                ));
            }
        }
        Ok(Presentation { p, m, a, b })
    }

    /// Full generator matrix of the lattice, `(p+m) x (p+2m)`.
    pub fn generators(&self) -> DMatrix<Complex64> {
        let (p, m) = (self.p, self.m);
        DMatrix::from_fn(p + m, p + 2 * m, |i, j| match (i < p, j < p) {
            (true, true) => Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0),
            (true, false) => Complex64::new(self.a[(i, j - p)], 0.0),
            (false, true) => Complex64::new(0.0, 0.0),
            (false, false) => self.b[(i - p, j - p)],
        })
    }
}

/// Order of growth of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthOrder {
    Finite(u32),
    Infinite,
}

impl GrowthOrder {
    pub fn finite(&self) -> Option<u32> {
        match self {
            GrowthOrder::Finite(r) => Some(*r),
            GrowthOrder::Infinite => None,
        }
    }
}

/// Entire curve in a semi-torus given by its lift
/// `z -> (exp(2 pi i F_1), ..., exp(2 pi i F_p), G_1, ..., G_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiTorusCurve {
    pub presentation: Presentation,
    pub f: Vec<Expression>,
    pub g: Vec<Expression>,
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

impl SemiTorusCurve {
    pub fn new(presentation: Presentation, f: Vec<Expression>, g: Vec<Expression>) -> Result<SemiTorusCurve, SemiTorusError> {
        if f.len() != presentation.p || g.len() != presentation.m {
            return Err(SemiTorusError::InvalidPresentation(format!(
                "curve has {} multiplicative and {} compact components, presentation needs {} and {}",
                f.len(),
                g.len(),
                presentation.p,
                presentation.m
            )));
        }
        Ok(SemiTorusCurve { presentation, f, g })
    }

    /// Curve in `(C*)^p` whose coordinates are `exp(L_j)` for the given
    /// exponents `L_j`.
    pub fn from_exponents(exponents: Vec<Expression>) -> SemiTorusCurve {
        let scale = Expression::constant(two_pi_i().inv());
        let f = exponents.into_iter().map(|l| scale.clone() * l).collect::<Vec<_>>();
        SemiTorusCurve {
            presentation: Presentation::multiplicative(f.len()),
            f,
            g: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.presentation.p
    }

    /// `L_j = 2 pi i F_j`, so that the `j`-th coordinate is `exp(L_j)`.
    pub fn exponent(&self, j: usize) -> Expression {
        Expression::constant(two_pi_i()) * self.f[j].clone()
    }

    pub fn exponents(&self) -> Vec<Expression> {
        (0..self.p()).map(|j| self.exponent(j)).collect()
    }

    pub fn coordinate(&self, j: usize) -> Expression {
        Expression::exp(self.exponent(j))
    }

    /// Point of the universal covering `(C*)^p x C^m` over `z`: the
    /// coordinates `exp(L_j(z))` followed by `G_k(z)`.
    pub fn evaluate(&self, z: Complex64) -> Result<Vec<Complex64>, SemiTorusError> {
        let mut out = Vec::with_capacity(self.p() + self.g.len());
        for j in 0..self.p() {
            out.push(crate::exprjet::evaluate(&self.coordinate(j), z)?);
        }
        for g in &self.g {
            out.push(crate::exprjet::evaluate(g, z)?);
        }
        Ok(out)
    }
}

fn degree_of(e: &Expression) -> Option<u32> {
    match e.polynomial_degree()? {
        Degree::NegInfinity => Some(0),
        Degree::Finite(d) => Some(d as u32),
    }
}

/// `max(deg F_j, 2 deg G_k)` when every component is a polynomial, infinite
/// otherwise.
pub fn classify_finite_order(curve: &SemiTorusCurve) -> GrowthOrder {
    let mut rho = 0;
    for f in &curve.f {
        match degree_of(f) {
            Some(d) => rho = rho.max(d),
            None => return GrowthOrder::Infinite,
        }
    }
    for g in &curve.g {
        match degree_of(g) {
            Some(d) => rho = rho.max(2 * d),
            None => return GrowthOrder::Infinite,
        }
    }
    GrowthOrder::Finite(rho)
}

/// The two parts of the order function and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFunction {
    pub t1: f64,
    pub t2: f64,
    pub t: f64,
}

/// `T(r, exp(L))`, which for an entire zero-free function is the proximity
/// `m(r, exp(L))` = mean of `(Re L)^+`.
pub fn exp_characteristic(exponent: &Expression, r: f64, q: &QuadratureSettings) -> Result<f64, SemiTorusError> {
    Ok(proximity_m(&Expression::exp(exponent.clone()), r, &ProximityMode::LogPlus, q)?.value)
}

/// Order function `T1 + T2` with `T1 = sum_j T(r, exp(2 pi i F_j))` and
/// `T2 = (1/4pi) int sum |G_k|^2 - (1/2) sum |G_k(0)|^2`.
pub fn order_function_t(curve: &SemiTorusCurve, r: f64, q: &QuadratureSettings) -> Result<OrderFunction, SemiTorusError> {
    let mut t1 = 0.0;
    for j in 0..curve.p() {
        t1 += exp_characteristic(&curve.exponent(j), r, q)?;
    }
    let t2 = compact_part(&curve.g, r, q)?;
    Ok(OrderFunction { t1, t2, t: t1 + t2 })
}

fn compact_part(g: &[Expression], r: f64, q: &QuadratureSettings) -> Result<f64, SemiTorusError> {
    if g.is_empty() {
        return Ok(0.0);
    }
    let at0: f64 = g
        .iter()
        .map(|e| crate::exprjet::evaluate(e, Complex64::new(0.0, 0.0)).map(|v| v.norm_sqr()))
        .sum::<Result<f64, _>>()?;
    let mean = circle_mean(
        |t| {
            let z = Complex64::from_polar(r, t);
            g.iter()
                .map(|e| crate::exprjet::evaluate(e, z).map(|v| v.norm_sqr()).unwrap_or(f64::NAN))
                .sum::<f64>()
        },
        q,
    )
    .map_err(crate::nevanlinna::NevanlinnaError::from)?;
    Ok(0.5 * mean.value - 0.5 * at0)
}

/// Rational approximation `p/q` with `q <= max_den` within `rel_tol`, from
/// the continued-fraction convergents of `x`.
pub fn rational_approximation(x: f64, max_den: u64, rel_tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 as u64 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= rel_tol * x.abs().max(1.0) {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = y - a;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

/// Curve built for a positive defect: coordinates `exp(c_j z^rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedCurve {
    pub curve: SemiTorusCurve,
    pub notes: Vec<String>,
}

/// Builds `z -> (exp(c_1 z^rho), ..., exp(c_p z^rho))` for
/// `0 < c_1 < ... < c_p` with pairwise irrational ratios (checked against
/// rational approximations with denominator at most `10^6`).
///
/// The sign of each exponent is flipped when `orient_to_origin` is set, which
/// points the curve at the corner where all coordinates vanish along the
/// rays where `Re z^rho > 0`. Linear data for a compact factor is dropped and
/// noted.
pub fn construct_positive_defect(
    p: usize,
    rho: u32,
    c: &[f64],
    linear: &[Expression],
    orient_to_origin: bool,
) -> Result<ConstructedCurve, SemiTorusError> {
    if c.len() != p || p == 0 {
        return Err(SemiTorusError::InvalidExponents(format!("expected {p} positive exponents, got {}", c.len())));
    }
    if rho < 1 {
        return Err(SemiTorusError::InvalidExponents("order must be at least 1".into()));
    }
    if c.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(SemiTorusError::InvalidExponents("exponents must be positive".into()));
    }
    if c.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SemiTorusError::InvalidExponents("exponents must be strictly increasing".into()));
    }
    for i in 0..p {
        for j in i + 1..p {
            if let Some((a, b)) = rational_approximation(c[j] / c[i], 1_000_000, 1e-13) {
                return Err(SemiTorusError::InvalidExponents(format!(
                    "c_{} / c_{} is numerically the rational {a}/{b}",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    let mut notes = Vec::new();
    if !linear.is_empty() {
        notes.push(format!(
            "dropped {} linear component(s): only the multiplicative part is supported",
            linear.len()
        ));
    }
    let sign = if orient_to_origin { -1.0 } else { 1.0 };
    let zr = Expression::power(Expression::z(), rho as i32);
    let exponents = c.iter().map(|&cj| Expression::real(sign * cj) * zr.clone()).collect();
    Ok(ConstructedCurve {
        curve: SemiTorusCurve::from_exponents(exponents),
        notes,
    })
}
