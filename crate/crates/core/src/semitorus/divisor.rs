use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SemiTorusCurve, SemiTorusError};
use crate::exprjet::{Expression, Scaled};
use crate::nevanlinna::{log_sum_exp, softplus, NormWeights};

/// Smooth compactification of `(C*)^p` carrying the closure of a divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Compactification {
    /// `(P^1)^p`; the section has degree `d_j` in `u_j`.
    ProductOfLines { multidegree: Vec<u32> },
    /// `P^p` with homogeneous coordinates `[1 : u_1 : ... : u_p]`; the section
    /// has total degree `degree`.
    Projective { degree: u32 },
}

/// Divisor on `(C*)^p` given by a Laurent-free polynomial
/// `sigma(u) = sum a_l u^l` with constant coefficients, together with the
/// compactification it is closed up in.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactifiedDivisor {
    pub p: usize,
    pub compactification: Compactification,
    /// Coefficient table; a stored `0.0` is a declared zero.
    pub terms: BTreeMap<Vec<u32>, Complex64>,
}

fn is_zero(c: &Complex64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

impl CompactifiedDivisor {
    pub fn new(
        p: usize,
        compactification: Compactification,
        terms: Vec<(Vec<u32>, Complex64)>,
    ) -> Result<CompactifiedDivisor, SemiTorusError> {
        let bad = |msg: String| Err(SemiTorusError::ConstructionError(msg));
        if let Compactification::ProductOfLines { multidegree } = &compactification {
            if multidegree.len() != p {
                return bad(format!("multidegree has {} entries, expected {p}", multidegree.len()));
            }
        }
        let mut table = BTreeMap::new();
        for (l, a) in terms {
            if l.len() != p {
                return bad(format!("exponent {l:?} has length {}, expected {p}", l.len()));
            }
            let within = match &compactification {
                Compactification::ProductOfLines { multidegree } => l.iter().zip(multidegree).all(|(x, d)| x <= d),
                Compactification::Projective { degree } => l.iter().sum::<u32>() <= *degree,
            };
            if !within {
                return bad(format!("exponent {l:?} exceeds the degree of the compactification"));
            }
            if table.insert(l.clone(), a).is_some() {
                return bad(format!("exponent {l:?} listed twice"));
            }
        }
        let d = CompactifiedDivisor {
            p,
            compactification,
            terms: table,
        };
        if d.support().next().is_none() {
            return bad("section has no nonzero term".into());
        }
        for j in 0..p {
            if !d.support().any(|l| l[j] == 0) {
                return bad(format!("section is divisible by u_{}", j + 1));
            }
            if let Compactification::ProductOfLines { multidegree } = &d.compactification {
                if !d.support().any(|l| l[j] == multidegree[j]) {
                    return bad(format!(
                        "section vanishes identically on u_{} = infinity; lower its degree",
                        j + 1
                    ));
                }
            }
        }
        if let Compactification::Projective { degree } = d.compactification {
            if !d.support().any(|l| l.iter().sum::<u32>() == degree) {
                return bad("section vanishes on the hyperplane at infinity; lower its degree".into());
            }
        }
        Ok(d)
    }

    pub fn product(multidegree: Vec<u32>, terms: Vec<(Vec<u32>, Complex64)>) -> Result<CompactifiedDivisor, SemiTorusError> {
        CompactifiedDivisor::new(multidegree.len(), Compactification::ProductOfLines { multidegree }, terms)
    }

    pub fn projective(p: usize, degree: u32, terms: Vec<(Vec<u32>, Complex64)>) -> Result<CompactifiedDivisor, SemiTorusError> {
        CompactifiedDivisor::new(p, Compactification::Projective { degree }, terms)
    }

    /// Exponents with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.terms.iter().filter(|(_, a)| !is_zero(a)).map(|(l, _)| l)
    }

    pub fn coefficient(&self, l: &[u32]) -> Complex64 {
        self.terms.get(l).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `sigma(u)` in log-scaled form.
    pub fn evaluate_scaled(&self, u: &[Complex64]) -> Scaled {
        let mut acc = Scaled::ZERO;
        for (l, a) in self.terms.iter().filter(|(_, a)| !is_zero(a)) {
            let mut term = Scaled::new(*a);
            for (x, k) in u.iter().zip(l) {
                if *k > 0 {
                    term = term.mul(Scaled::new(*x).powi(*k as i32).expect("positive power"));
                }
            }
            acc = acc.add(term);
        }
        acc
    }

    pub fn evaluate(&self, u: &[Complex64]) -> Complex64 {
        self.evaluate_scaled(u).to_complex()
    }

    /// `log` of the metric factor: `sum_j (d_j/2) log(1+|u_j|^2)` on
    /// `(P^1)^p`, `(d/2) log(1 + sum |u_j|^2)` on `P^p`.
    pub fn log_metric(&self, u: &[Complex64]) -> f64 {
        match &self.compactification {
            Compactification::ProductOfLines { multidegree } => u
                .iter()
                .zip(multidegree)
                .map(|(x, d)| 0.5 * *d as f64 * softplus(2.0 * x.norm().ln()))
                .sum(),
            Compactification::Projective { degree } => {
                let mut logs = vec![0.0];
                logs.extend(u.iter().map(|x| 2.0 * x.norm().ln()));
                0.5 * *degree as f64 * log_sum_exp(&logs)
            }
        }
    }

    /// `log ||sigma(u)||` for the metric above.
    pub fn section_norm(&self, u: &[Complex64]) -> Result<f64, SemiTorusError> {
        let s = self.evaluate_scaled(u);
        if s.is_zero() {
            return Err(SemiTorusError::OnDivisor);
        }
        Ok(s.ln_abs() - self.log_metric(u))
    }

    /// The same divisor written in the chart where `u_j` is replaced by
    /// `1/u_j` for every `j` with `mask[j]`; the section is multiplied by
    /// `u_j^{d_j}` so that it stays polynomial.
    pub fn inverted(&self, mask: &[bool]) -> Result<CompactifiedDivisor, SemiTorusError> {
        let Compactification::ProductOfLines { multidegree } = &self.compactification else {
            return Err(SemiTorusError::ConstructionError(
                "chart inversion is defined for products of lines".into(),
            ));
        };
        let terms = self
            .terms
            .iter()
            .map(|(l, a)| {
                let l2 = l
                    .iter()
                    .zip(multidegree)
                    .zip(mask)
                    .map(|((x, d), flip)| if *flip { d - x } else { *x })
                    .collect();
                (l2, *a)
            })
            .collect();
        CompactifiedDivisor::new(self.p, self.compactification.clone(), terms)
    }

    /// `sigma` pulled back along the curve,
    /// `sum_l a_l exp(sum_j l_j L_j(z))`.
    pub fn pullback(&self, curve: &SemiTorusCurve) -> Result<Expression, SemiTorusError> {
        if curve.p() != self.p {
            return Err(SemiTorusError::InvalidPresentation(format!(
                "curve has {} multiplicative components, divisor lives on (C*)^{}",
                curve.p(),
                self.p
            )));
        }
        let exps = curve.exponents();
        let terms = self
            .terms
            .iter()
            .filter(|(_, a)| !is_zero(a))
            .map(|(l, a)| {
                let parts: Vec<Expression> = l
                    .iter()
                    .zip(&exps)
                    .filter(|(k, _)| **k > 0)
                    .map(|(k, e)| Expression::real(*k as f64) * e.clone())
                    .collect();
                if parts.is_empty() {
                    Expression::constant(*a)
                } else {
                    Expression::constant(*a) * Expression::exp(Expression::sum(parts))
                }
            })
            .collect();
        Ok(Expression::sum(terms))
    }

    /// Metric weights for the proximity integral along `curve`.
    pub fn norm_weights(&self, curve: &SemiTorusCurve) -> NormWeights {
        match &self.compactification {
            Compactification::ProductOfLines { multidegree } => NormWeights {
                exponents: curve.exponents(),
                degrees: multidegree.iter().map(|d| *d as f64).collect(),
                projective: false,
            },
            Compactification::Projective { degree } => NormWeights {
                exponents: curve.exponents(),
                degrees: vec![*degree as f64],
                projective: true,
            },
        }
    }
}
