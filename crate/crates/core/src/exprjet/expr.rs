use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::ExprError;

/// Node kinds of the expression grammar.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Constant(Complex64),
    Variable,
    Sum(Vec<Expression>),
    Product(Vec<Expression>),
    Power(Expression, i32),
    Exp(Expression),
    Quotient(Expression, Expression),
}

#[derive(Debug, PartialEq)]
struct Node {
    kind: Kind,
    // Canonical coefficients (ascending, trailing zeros trimmed) when the
    // subtree is a polynomial in z. The zero polynomial is the empty vector.
    poly: Option<Vec<Complex64>>,
}

/// Immutable expression tree over the single variable `z`.
///
/// Constructors apply light canonical flattening (nested sums and products
/// are merged, constants are folded). Equality is structural.
#[derive(Clone, PartialEq)]
pub struct Expression(Arc<Node>);

/// Exact polynomial degree of an expression that is a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    /// The identically zero polynomial (degree minus infinity).
    NegInfinity,
    Finite(usize),
}

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn trim(mut v: Vec<Complex64>) -> Vec<Complex64> {
    while matches!(v.last(), Some(c) if c.re == 0.0 && c.im == 0.0) {
        v.pop();
    }
    v
}

fn poly_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(C0) + b.get(i).copied().unwrap_or(C0))
        .collect();
    trim(out)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn as_constant(p: &Option<Vec<Complex64>>) -> Option<Complex64> {
    match p {
        Some(v) if v.is_empty() => Some(C0),
        Some(v) if v.len() == 1 => Some(v[0]),
        _ => None,
    }
}

impl Expression {
    fn from_kind(kind: Kind) -> Expression {
        let poly = match &kind {
            Kind::Constant(c) => Some(trim(vec![*c])),
            Kind::Variable => Some(vec![C0, C1]),
            Kind::Sum(terms) => terms.iter().try_fold(Vec::new(), |acc, t| {
                t.0.poly.as_ref().map(|p| poly_add(&acc, p))
            }),
            Kind::Product(factors) => factors.iter().try_fold(vec![C1], |acc, f| {
                f.0.poly.as_ref().map(|p| poly_mul(&acc, p))
            }),
            Kind::Power(base, k) => match &base.0.poly {
                Some(p) if *k >= 0 => {
                    let mut acc = vec![C1];
                    for _ in 0..*k {
                        acc = poly_mul(&acc, p);
                    }
                    Some(acc)
                }
                Some(p) if p.len() == 1 => Some(vec![p[0].powi(*k)]),
                _ => None,
            },
            // exp of a constant is folded at construction, so any surviving
            // exp node is non-polynomial.
            Kind::Exp(_) => None,
            Kind::Quotient(num, den) => match (&num.0.poly, as_constant(&den.0.poly)) {
                (Some(p), Some(c)) if c != C0 => Some(trim(p.iter().map(|x| x / c).collect())),
                _ => None,
            },
        };
        Expression(Arc::new(Node { kind, poly }))
    }

    pub fn constant(c: impl Into<Complex64>) -> Expression {
        Expression::from_kind(Kind::Constant(c.into()))
    }

    pub fn real(x: f64) -> Expression {
        Expression::constant(Complex64::new(x, 0.0))
    }

    pub fn z() -> Expression {
        Expression::from_kind(Kind::Variable)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// The constant value if this node is a literal constant.
    pub fn constant_value(&self) -> Option<Complex64> {
        match self.kind() {
            Kind::Constant(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self.constant_value(), Some(c) if c == C0)
    }

    /// Polynomial built from ascending coefficients `c0 + c1 z + ...`.
    pub fn polynomial(coeffs: &[Complex64]) -> Expression {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C0)
            .map(|(k, c)| match k {
                0 => Expression::constant(*c),
                1 => Expression::product(vec![Expression::constant(*c), Expression::z()]),
                _ => Expression::product(vec![
                    Expression::constant(*c),
                    Expression::power(Expression::z(), k as i32),
                ]),
            })
            .collect();
        Expression::sum(terms)
    }

    pub fn sum(terms: Vec<Expression>) -> Expression {
        let mut flat = Vec::with_capacity(terms.len());
        let mut constant = C0;
        for t in terms {
            match t.kind() {
                Kind::Sum(inner) => {
                    for u in inner {
                        match u.constant_value() {
                            Some(c) => constant += c,
                            None => flat.push(u.clone()),
                        }
                    }
                }
                Kind::Constant(c) => constant += c,
                _ => flat.push(t),
            }
        }
        if constant != C0 {
            flat.insert(0, Expression::constant(constant));
        }
        match flat.len() {
            0 => Expression::constant(C0),
            1 => flat.pop().unwrap(),
            _ => Expression::from_kind(Kind::Sum(flat)),
        }
    }

    pub fn product(factors: Vec<Expression>) -> Expression {
        let mut flat = Vec::with_capacity(factors.len());
        let mut constant = C1;
        for f in factors {
            match f.kind() {
                Kind::Product(inner) => {
                    for u in inner {
                        match u.constant_value() {
                            Some(c) => constant *= c,
                            None => flat.push(u.clone()),
                        }
                    }
                }
                Kind::Constant(c) => constant *= c,
                _ => flat.push(f),
            }
        }
        if constant == C0 {
            return Expression::constant(C0);
        }
        if constant != C1 {
            flat.insert(0, Expression::constant(constant));
        }
        match flat.len() {
            0 => Expression::constant(C1),
            1 => flat.pop().unwrap(),
            _ => Expression::from_kind(Kind::Product(flat)),
        }
    }

    pub fn power(base: Expression, k: i32) -> Expression {
        if k == 0 {
            return Expression::constant(C1);
        }
        if k == 1 {
            return base;
        }
        if let Some(c) = base.constant_value() {
            if c != C0 || k > 0 {
                return Expression::constant(c.powi(k));
            }
        }
        Expression::from_kind(Kind::Power(base, k))
    }

    pub fn exp(arg: Expression) -> Expression {
        if let Some(c) = arg.constant_value() {
            return Expression::constant(c.exp());
        }
        Expression::from_kind(Kind::Exp(arg))
    }

    /// `num / den`. Rejects a denominator that is identically zero.
    pub fn quotient(num: Expression, den: Expression) -> Result<Expression, ExprError> {
        if matches!(&den.0.poly, Some(p) if p.is_empty()) {
            return Err(ExprError::ZeroDenominator);
        }
        if let Some(c) = den.constant_value() {
            return Ok(Expression::product(vec![Expression::constant(C1 / c), num]));
        }
        Ok(Expression::from_kind(Kind::Quotient(num, den)))
    }

    pub fn recip(&self) -> Result<Expression, ExprError> {
        Expression::quotient(Expression::constant(C1), self.clone())
    }

    /// `exp(c * z)`.
    pub fn exp_linear(c: impl Into<Complex64>) -> Expression {
        Expression::exp(Expression::product(vec![Expression::constant(c), Expression::z()]))
    }

    /// Canonical polynomial coefficients if this expression is a polynomial.
    pub fn polynomial_coefficients(&self) -> Option<&[Complex64]> {
        self.0.poly.as_deref()
    }

    /// Exact degree if the expression is a polynomial in `z`, `None` otherwise.
    pub fn polynomial_degree(&self) -> Option<Degree> {
        self.0.poly.as_ref().map(|p| {
            if p.is_empty() {
                Degree::NegInfinity
            } else {
                Degree::Finite(p.len() - 1)
            }
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.kind() {
            Kind::Constant(_) | Kind::Variable => 0,
            Kind::Sum(v) | Kind::Product(v) => v.iter().map(Expression::size).sum(),
            Kind::Power(b, _) | Kind::Exp(b) => b.size(),
            Kind::Quotient(a, b) => a.size() + b.size(),
        }
    }

    /// Stable 64-bit fingerprint of the tree (hex), independent of process.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_string().as_bytes());
        hex::encode(&digest[..8])
    }

    /// Write this expression as `numerator / denominator` with both parts free
    /// of quotients. Fails for `exp` of a non-entire argument, which has an
    /// essential singularity.
    pub fn as_fraction(&self) -> Result<(Expression, Expression), ExprError> {
        let one = || Expression::constant(C1);
        Ok(match self.kind() {
            Kind::Constant(_) | Kind::Variable => (self.clone(), one()),
            Kind::Sum(terms) => {
                let mut num = Expression::constant(C0);
                let mut den = one();
                for t in terms {
                    let (n, d) = t.as_fraction()?;
                    if d.constant_value() == Some(C1) && den.constant_value() == Some(C1) {
                        num = num + n;
                    } else {
                        num = num * d.clone() + n * den.clone();
                        den = den * d;
                    }
                }
                (num, den)
            }
            Kind::Product(factors) => {
                let mut num = one();
                let mut den = one();
                for f in factors {
                    let (n, d) = f.as_fraction()?;
                    num = num * n;
                    den = den * d;
                }
                (num, den)
            }
            Kind::Power(base, k) => {
                let (n, d) = base.as_fraction()?;
                if *k >= 0 {
                    (Expression::power(n, *k), Expression::power(d, *k))
                } else {
                    (Expression::power(d, -k), Expression::power(n, -k))
                }
            }
            Kind::Exp(arg) => {
                let (_, d) = arg.as_fraction()?;
                if d.constant_value().is_none() {
                    return Err(ExprError::NotMeromorphic);
                }
                (self.clone(), one())
            }
            Kind::Quotient(a, b) => {
                let (na, da) = a.as_fraction()?;
                let (nb, db) = b.as_fraction()?;
                (na * db, da * nb)
            }
        })
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({self})")
    }
}

fn fmt_complex(c: &Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{:?}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{:?}i", c.im)
    } else {
        write!(f, "({:?}{:+?}i)", c.re, c.im)
    }
}

/// Renders in the scenario text syntax, so the output parses back.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Constant(c) => fmt_complex(c, f),
            Kind::Variable => write!(f, "z"),
            Kind::Sum(terms) => {
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Kind::Product(factors) => {
                write!(f, "(")?;
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Kind::Power(b, k) => write!(f, "({b})^({k})"),
            Kind::Exp(a) => write!(f, "exp({a})"),
            Kind::Quotient(a, b) => write!(f, "({a}/{b})"),
        }
    }
}

impl Hash for Expression {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_string().hash(state)
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        Expression::sum(vec![self, rhs])
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        Expression::sum(vec![self, -rhs])
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        Expression::product(vec![self, rhs])
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression::product(vec![Expression::real(-1.0), self])
    }
}

impl From<f64> for Expression {
    fn from(x: f64) -> Expression {
        Expression::real(x)
    }
}

impl From<Complex64> for Expression {
    fn from(c: Complex64) -> Expression {
        Expression::constant(c)
    }
}
