//! Combinatorics of divisors with constant coefficients: Newton support,
//! the multiplicative part of the stabilizer, and the corner test for the
//! boundary condition.

mod rational;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semitorus::{Compactification, CompactifiedDivisor, SemiTorusError};

pub use rational::{primitive_integer_rows, rational_null_space, rank};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DivisorError {
    #[error("hyperplane coincides with a coordinate hyperplane")]
    DegenerateHyperplane,
    #[error(transparent)]
    Construction(#[from] SemiTorusError),
}

/// End of a `P^1` factor: `u = 0` is `[1:0]`, `u = infinity` is `[0:1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Zero,
    Infinity,
}

/// Torus-fixed point of the compactification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    Product(Vec<End>),
    /// Coordinate vertex of `P^p`: 0 is `[1:0:...:0]`, `k` has only `w_k != 0`.
    Vertex { index: usize, dim: usize },
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Corner::Product(ends) => {
                let parts: Vec<&str> = ends
                    .iter()
                    .map(|e| match e {
                        End::Zero => "[1:0]",
                        End::Infinity => "[0:1]",
                    })
                    .collect();
                write!(f, "({})", parts.join(","))
            }
            Corner::Vertex { index, dim } => {
                let parts: Vec<&str> = (0..=*dim).map(|i| if i == *index { "1" } else { "0" }).collect();
                write!(f, "[{}]", parts.join(":"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    pub corner: Corner,
    pub label: String,
    /// Exponent of the monomial that survives at the corner.
    pub exponent: Vec<u32>,
    pub coefficient: Complex64,
    pub nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonAnalysis {
    pub support: Vec<Vec<u32>>,
    pub difference_rank: usize,
    /// Primitive integer vectors in reduced echelon form.
    pub stabilizer_basis: Vec<Vec<i64>>,
    /// Largest relative deviation from proportionality seen in the random
    /// verification of the basis.
    pub stabilizer_check: f64,
    pub corners: Vec<CornerReport>,
    pub boundary_condition_holds: bool,
}

/// Exponents carrying a nonzero coefficient, in lexicographic order.
pub fn newton_support(d: &CompactifiedDivisor) -> Vec<Vec<u32>> {
    d.support().cloned().collect()
}

fn differences(support: &[Vec<u32>]) -> Vec<Vec<i64>> {
    let Some(base) = support.first() else {
        return Vec::new();
    };
    support[1..]
        .iter()
        .map(|a| a.iter().zip(base).map(|(x, y)| *x as i64 - *y as i64).collect())
        .collect()
}

/// One-parameter subgroups `t -> (t^{n_1}, ..., t^{n_p})` preserving the
/// divisor: the integer vectors orthogonal to all support differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub basis: Vec<Vec<i64>>,
    pub difference_rank: usize,
    pub max_deviation: f64,
}

pub fn stabilizer(d: &CompactifiedDivisor) -> Stabilizer {
    let support = newton_support(d);
    let diffs = differences(&support);
    let difference_rank = rank(&diffs, d.p);
    let basis = primitive_integer_rows(&rational_null_space(&diffs, d.p));
    let max_deviation = verify_stabilizer(d, &basis, 20, 0x5eed);
    Stabilizer {
        basis,
        difference_rank,
        max_deviation,
    }
}

/// Largest relative deviation of `sigma(t^n u) sigma(u') - sigma(t^n u')
/// sigma(u)` over random samples, for every basis vector `n`.
pub fn verify_stabilizer(d: &CompactifiedDivisor, basis: &[Vec<i64>], samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> Complex64 {
        Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let mut worst: f64 = 0.0;
    for n in basis {
        for _ in 0..samples {
            let t = point(&mut rng);
            let u: Vec<Complex64> = (0..d.p).map(|_| point(&mut rng)).collect();
            let v: Vec<Complex64> = (0..d.p).map(|_| point(&mut rng)).collect();
            let act = |x: &[Complex64]| -> Vec<Complex64> {
                x.iter().zip(n).map(|(xi, k)| xi * t.powi(*k as i32)).collect()
            };
            let a = d.evaluate(&act(&u)) * d.evaluate(&v);
            let b = d.evaluate(&act(&v)) * d.evaluate(&u);
            let scale = a.norm() + b.norm();
            if scale > 0.0 {
                worst = worst.max((a - b).norm() / scale);
            }
        }
    }
    worst
}

/// Corner coefficients; the boundary condition holds iff all are nonzero.
pub fn boundary_condition(d: &CompactifiedDivisor) -> Vec<CornerReport> {
    let mut out = Vec::new();
    match &d.compactification {
        Compactification::ProductOfLines { multidegree } => {
            for mask in 0..(1usize << d.p) {
                let ends: Vec<End> = (0..d.p)
                    .map(|j| if mask >> j & 1 == 1 { End::Infinity } else { End::Zero })
                    .collect();
                let exponent: Vec<u32> = ends
                    .iter()
                    .zip(multidegree)
                    .map(|(e, dj)| if *e == End::Infinity { *dj } else { 0 })
                    .collect();
                out.push(report(d, Corner::Product(ends), exponent));
            }
        }
        Compactification::Projective { degree } => {
            for index in 0..=d.p {
                let mut exponent = vec![0; d.p];
                if index > 0 {
                    exponent[index - 1] = *degree;
                }
                out.push(report(d, Corner::Vertex { index, dim: d.p }, exponent));
            }
        }
    }
    out
}

fn report(d: &CompactifiedDivisor, corner: Corner, exponent: Vec<u32>) -> CornerReport {
    let coefficient = d.coefficient(&exponent);
    CornerReport {
        label: corner.to_string(),
        corner,
        nonzero: coefficient.re != 0.0 || coefficient.im != 0.0,
        exponent,
        coefficient,
    }
}

/// Support, stabilizer and corner test together.
pub fn analyze(d: &CompactifiedDivisor) -> NewtonAnalysis {
    let st = stabilizer(d);
    let corners = boundary_condition(d);
    NewtonAnalysis {
        support: newton_support(d),
        difference_rank: st.difference_rank,
        stabilizer_basis: st.basis,
        stabilizer_check: st.max_deviation,
        boundary_condition_holds: corners.iter().all(|c| c.nonzero),
        corners,
    }
}

/// Restriction of the section to a boundary hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRestriction {
    pub label: String,
    pub terms: usize,
}

/// Restrictions of the section to each boundary hypersurface; a face with
/// no surviving term lies entirely inside the closure of the divisor.
pub fn boundary_restrictions(d: &CompactifiedDivisor) -> Vec<FaceRestriction> {
    let support = newton_support(d);
    let mut out = Vec::new();
    match &d.compactification {
        Compactification::ProductOfLines { multidegree } => {
            for j in 0..d.p {
                for (end, target) in [("0", 0), ("inf", multidegree[j])] {
                    out.push(FaceRestriction {
                        label: format!("u_{} = {end}", j + 1),
                        terms: support.iter().filter(|l| l[j] == target).count(),
                    });
                }
            }
        }
        Compactification::Projective { degree } => {
            out.push(FaceRestriction {
                label: "w_0 = 0".into(),
                terms: support.iter().filter(|l| l.iter().sum::<u32>() == *degree).count(),
            });
            for j in 0..d.p {
                out.push(FaceRestriction {
                    label: format!("w_{} = 0", j + 1),
                    terms: support.iter().filter(|l| l[j] == 0).count(),
                });
            }
        }
    }
    out
}

/// Points `u_j = base_j t^{+-1}` moving into `corner` (product case).
pub fn corner_ray(corner: &[End], base: &[Complex64], t: f64) -> Vec<Complex64> {
    corner
        .iter()
        .zip(base)
        .map(|(e, b)| match e {
            End::Zero => b / t,
            End::Infinity => b * t,
        })
        .collect()
}

/// Divisor on `(C*)^n` cut out by `a_0 + sum a_j u_j` where the hyperplane is
/// `sum a_j w_j = 0` in `P^n` and `u_j = w_j / w_0`.
pub fn hyperplane_scenario(a: &[Complex64]) -> Result<CompactifiedDivisor, DivisorError> {
    let nonzero = a.iter().filter(|x| x.re != 0.0 || x.im != 0.0).count();
    if a.len() < 2 || nonzero <= 1 {
        return Err(DivisorError::DegenerateHyperplane);
    }
    let n = a.len() - 1;
    let terms = a
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let mut l = vec![0; n];
            if k > 0 {
                l[k - 1] = 1;
            }
            (l, *x)
        })
        .collect();
    Ok(CompactifiedDivisor::projective(n, 1, terms)?)
}

/// Whether the coordinate hyperplanes of `P^n` together with
/// `sum a_j w_j = 0` are in general position: every `n+1` of the `n+2`
/// normal vectors are linearly independent.
pub fn general_position(a: &[Complex64]) -> bool {
    let n1 = a.len();
    let mut rows: Vec<Vec<Complex64>> = (0..n1)
        .map(|i| (0..n1).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .collect();
    rows.push(a.to_vec());
    (0..rows.len()).all(|skip| {
        let chosen: Vec<&Vec<Complex64>> = rows.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r).collect();
        let m = DMatrix::from_fn(n1, n1, |i, j| chosen[i][j]);
        m.determinant().norm() > 1e-12
    })
}

#[cfg(test)]
mod tests;
