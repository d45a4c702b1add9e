//! Theta divisors on elliptic curves and their products, pulled back along
//! one-parameter subgroups `z -> a z + b`.
//!
//! The pullback of a theta divisor along a line has a zero at every point
//! where some `a_i z + b_i` hits the lattice, so the zero ledger can be
//! compared one-for-one with a direct lattice enumeration.

mod theta;

pub use theta::{theta_eval, EllipticLattice};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exprjet::{ExprError, Scaled};
use crate::nevanlinna::{
    circle_mean, find_zeros_with, fit, Holomorphic, NevanlinnaError, QuadratureSettings, RegressionModel,
    RegressionSummary, ZeroError, ZeroLedger, ZeroSettings,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbelianError {
    #[error("lattice parameter {0} must have positive imaginary part")]
    InvalidLattice(Complex64),
    #[error("argument {0} could not be reduced to the working strip")]
    TruncationInsufficient(Complex64),
    #[error("the subgroup direction is zero")]
    ConstantCurve,
    #[error("the curve lies inside the theta divisor")]
    CurveInsideDivisor,
    #[error("{0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Zeros(#[from] ZeroError),
    #[error(transparent)]
    Nevanlinna(#[from] NevanlinnaError),
}

impl From<AbelianError> for ExprError {
    fn from(e: AbelianError) -> ExprError {
        match e {
            AbelianError::TruncationInsufficient(z) => ExprError::Overflow(z),
            _ => ExprError::Overflow(Complex64::new(f64::NAN, f64::NAN)),
        }
    }
}

/// The divisor `sum_i pr_i^* Theta_i` on `E_1 x ... x E_g`, cut out by the
/// product of the odd theta functions of the factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaDivisorSpec {
    pub factors: Vec<EllipticLattice>,
}

impl ThetaDivisorSpec {
    pub fn single(lattice: EllipticLattice) -> ThetaDivisorSpec {
        ThetaDivisorSpec { factors: vec![lattice] }
    }

    pub fn product(factors: Vec<EllipticLattice>) -> ThetaDivisorSpec {
        ThetaDivisorSpec { factors }
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }
}

/// The line `z -> a z + b` in the universal cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupCurve {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl SubgroupCurve {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<SubgroupCurve, AbelianError> {
        if a.len() != b.len() || a.is_empty() {
            return Err(AbelianError::DimensionMismatch(format!(
                "direction has {} entries, base point {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().all(|x| x.norm() == 0.0) {
            return Err(AbelianError::ConstantCurve);
        }
        Ok(SubgroupCurve { a, b })
    }

    pub fn scaled(&self, lambda: Complex64) -> SubgroupCurve {
        SubgroupCurve {
            a: self.a.iter().map(|x| x * lambda).collect(),
            b: self.b.clone(),
        }
    }
}

/// `z -> prod_i theta_i(a_i z + b_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPullback {
    pub curve: SubgroupCurve,
    pub spec: ThetaDivisorSpec,
}

impl TorusPullback {
    pub fn new(curve: SubgroupCurve, spec: ThetaDivisorSpec) -> Result<TorusPullback, AbelianError> {
        if curve.a.len() != spec.dimension() {
            return Err(AbelianError::DimensionMismatch(format!(
                "curve in dimension {}, divisor in dimension {}",
                curve.a.len(),
                spec.dimension()
            )));
        }
        for ((a, b), l) in curve.a.iter().zip(&curve.b).zip(&spec.factors) {
            if a.norm() == 0.0 && l.theta(*b)?.is_zero() {
                return Err(AbelianError::CurveInsideDivisor);
            }
        }
        Ok(TorusPullback { curve, spec })
    }

    fn arguments(&self, z: Complex64) -> impl Iterator<Item = (&EllipticLattice, Complex64)> + '_ {
        self.spec
            .factors
            .iter()
            .zip(self.curve.a.iter().zip(&self.curve.b))
            .map(move |(l, (a, b))| (l, a * z + b))
    }

    /// `sum_i log ||theta_i(a_i z + b_i)||`.
    pub fn log_norm(&self, z: Complex64) -> Result<f64, AbelianError> {
        self.arguments(z).map(|(l, w)| l.log_norm(w)).sum()
    }
}

impl Holomorphic for TorusPullback {
    fn value(&self, z: Complex64) -> Result<Scaled, ExprError> {
        let mut acc = Scaled::new(Complex64::new(1.0, 0.0));
        for (l, w) in self.arguments(z) {
            acc = acc.mul(l.theta(w)?);
        }
        Ok(acc)
    }

    fn value_and_log_derivative(&self, z: Complex64) -> Result<(Scaled, Complex64), ExprError> {
        let mut acc = Scaled::new(Complex64::new(1.0, 0.0));
        let mut logd = Complex64::new(0.0, 0.0);
        for ((l, w), a) in self.arguments(z).zip(&self.curve.a) {
            let (v, d) = l.theta_with_log_derivative(w)?;
            let d = d.ok_or(ExprError::ZeroAtPoint(z))?;
            acc = acc.mul(v);
            logd += a * d;
        }
        Ok((acc, logd))
    }

    fn fingerprint(&self) -> String {
        let parts: Vec<String> = self
            .arguments(Complex64::new(0.0, 0.0))
            .zip(&self.curve.a)
            .map(|((l, b), a)| format!("theta[{}]({}*z+{})", l.tau, a, b))
            .collect();
        parts.join("*")
    }
}

/// Certified zero ledger of the pullback in `|z| <= radius`.
pub fn torus_counting(
    curve: &SubgroupCurve,
    spec: &ThetaDivisorSpec,
    radius: f64,
    settings: &ZeroSettings,
) -> Result<ZeroLedger, AbelianError> {
    let h = TorusPullback::new(curve.clone(), spec.clone())?;
    Ok(find_zeros_with(&h, radius, *settings)?)
}

/// Zeros of the pullback in `|z| <= radius` by direct enumeration of the
/// lattice points `lambda` with `|lambda - b_i| <= |a_i| radius`.
pub fn lattice_zeros(curve: &SubgroupCurve, spec: &ThetaDivisorSpec, radius: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    for ((l, a), b) in spec.factors.iter().zip(&curve.a).zip(&curve.b) {
        if a.norm() == 0.0 {
            continue;
        }
        let reach = a.norm() * radius;
        let kmax = ((reach + b.im.abs()) / l.tau.im).ceil() as i64 + 1;
        for k in -kmax..=kmax {
            let row = l.tau * k as f64;
            let lmin = (b.re - row.re - reach).floor() as i64 - 1;
            let lmax = (b.re - row.re + reach).ceil() as i64 + 1;
            for j in lmin..=lmax {
                let lambda = row + j as f64;
                let z = (lambda - b) / a;
                if z.norm() <= radius {
                    out.push(z);
                }
            }
        }
    }
    out.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    out
}

/// One row of the torus counting table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusRow {
    pub t: f64,
    pub n: u64,
    #[serde(rename = "N")]
    pub counting: f64,
    /// `n(t) / t^2`.
    pub density: f64,
}

pub fn torus_table(ledger: &ZeroLedger, grid: &[f64]) -> Result<Vec<TorusRow>, AbelianError> {
    grid.iter()
        .map(|&t| {
            let n = ledger.count(t, None);
            Ok(TorusRow {
                t,
                n,
                counting: ledger.counting(t, None)?,
                density: n as f64 / (t * t),
            })
        })
        .collect()
}

/// Fit of `N(r)` against `r^2` and the band of `n(t)/t^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticLaw {
    pub fit: RegressionSummary,
    /// Leading coefficient of `N(r) ~ leading * r^2`.
    pub leading: f64,
    pub density_min: f64,
    pub density_max: f64,
}

impl QuadraticLaw {
    /// Both liminf and limsup estimates lie strictly inside `(0, inf)`.
    pub fn band_is_positive_and_finite(&self) -> bool {
        self.density_min > 0.0 && self.density_max.is_finite()
    }
}

pub fn quadratic_law(ledger: &ZeroLedger, grid: &[f64]) -> Result<QuadraticLaw, AbelianError> {
    let rows = torus_table(ledger, grid)?;
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.counting)).collect();
    let summary = fit(&samples, RegressionModel::Power(2.0), None)?;
    Ok(QuadraticLaw {
        leading: summary.slope,
        fit: summary,
        density_min: rows.iter().map(|r| r.density).fold(f64::INFINITY, f64::min),
        density_max: rows.iter().map(|r| r.density).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// `m_f(r; D) = mean_{|z| = r} -log ||sigma(f(z))||` with the lattice-periodic
/// norm of [`EllipticLattice::log_norm`].
pub fn torus_proximity(h: &TorusPullback, r: f64, q: &QuadratureSettings) -> Result<f64, AbelianError> {
    let integral = circle_mean(
        |phi| match h.log_norm(Complex64::from_polar(r, phi)) {
            Ok(v) if v.is_finite() => -v,
            _ => 0.0,
        },
        q,
    )
    .map_err(NevanlinnaError::from)?;
    Ok(integral.value)
}

/// Defect of the theta divisor along the line, with `T = N + m` by the
/// first main theorem: `1 - lead(N) / lead(N + m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusDefect {
    pub n_leading: f64,
    pub t_leading: f64,
    pub delta: f64,
    pub proximity: Vec<(f64, f64)>,
}

pub fn torus_defect(
    h: &TorusPullback,
    ledger: &ZeroLedger,
    grid: &[f64],
    q: &QuadratureSettings,
) -> Result<TorusDefect, AbelianError> {
    let proximity: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&r| torus_proximity(h, r, q).map(|m| (r, m)))
        .collect::<Result<_, _>>()?;
    let mut n_samples = Vec::new();
    let mut t_samples = Vec::new();
    for &(r, m) in &proximity {
        let n = ledger.counting(r, None)?;
        n_samples.push((r, n));
        t_samples.push((r, n + m));
    }
    let n_leading = fit(&n_samples, RegressionModel::Power(2.0), None)?.slope;
    let t_leading = fit(&t_samples, RegressionModel::Power(2.0), None)?.slope;
    Ok(TorusDefect {
        n_leading,
        t_leading,
        delta: 1.0 - n_leading / t_leading,
        proximity,
    })
}

/// Expected limit of `n(t)/t^2` for the line: `pi sum_i |a_i|^2 / Im tau_i`.
pub fn expected_density(curve: &SubgroupCurve, spec: &ThetaDivisorSpec) -> f64 {
    spec.factors
        .iter()
        .zip(&curve.a)
        .map(|(l, a)| PI * a.norm_sqr() / l.covolume())
        .sum()
}

#[cfg(test)]
mod tests;
