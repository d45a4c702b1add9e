//! Proximity, counting and characteristic functions of meromorphic functions.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{circle_mean, Integral, QuadratureSettings};
use super::zeros::{find_zeros_with, ZeroLedger, ZeroRecord, ZeroSettings};
use super::{Holomorphic, NevanlinnaError};
use crate::exprjet::{ExprError, Expression};

/// `log(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Weights turning `|h|` into the norm of a section of a line bundle on a
/// compactified semi-torus, evaluated along a curve whose coordinates are
/// `u_j = exp(exponents[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormWeights {
    pub exponents: Vec<Expression>,
    pub degrees: Vec<f64>,
    /// `true` for the projective-space compactification, where the metric
    /// factor is `(1 + sum |u_j|^2)^{d/2}` with `d = degrees[0]`.
    pub projective: bool,
}

impl NormWeights {
    /// `log` of the metric factor dividing `|sigma|`.
    pub fn log_metric(&self, z: Complex64) -> Result<f64, ExprError> {
        if self.projective {
            let d = self.degrees.first().copied().unwrap_or(0.0);
            let mut logs = vec![0.0];
            for e in &self.exponents {
                logs.push(2.0 * e.eval_scaled(z)?.to_complex().re);
            }
            Ok(0.5 * d * log_sum_exp(&logs))
        } else {
            let mut acc = 0.0;
            for (e, d) in self.exponents.iter().zip(&self.degrees) {
                acc += 0.5 * d * softplus(2.0 * e.eval_scaled(z)?.to_complex().re);
            }
            Ok(acc)
        }
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// What the proximity integral averages over the circle.
#[derive(Debug, Clone, PartialEq)]
pub enum ProximityMode {
    /// `log+ |h|`.
    LogPlus,
    /// `log+ (1/|h|)`, i.e. the proximity function of `1/h`.
    ReciprocalLogPlus,
    /// `log (1/||h||)` for the weighted norm.
    ReciprocalNorm(NormWeights),
}

/// `log|h(z)|`, nudging the angle when `z` is an exact zero or pole.
fn log_abs_on_circle<H: Holomorphic + ?Sized>(
    h: &H,
    r: f64,
    theta: f64,
    failure: &RefCell<Option<ExprError>>,
) -> f64 {
    let mut t = theta;
    for _ in 0..3 {
        let z = Complex64::from_polar(r, t);
        match h.value(z) {
            Ok(v) => return v.ln_abs(),
            Err(ExprError::PoleAtPoint(_)) | Err(ExprError::ZeroAtPoint(_)) => t += 1e-12,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                return f64::NAN;
            }
        }
    }
    f64::NAN
}

/// Proximity function `m(r)` for the chosen mode.
pub fn proximity_m<H: Holomorphic + ?Sized>(
    h: &H,
    r: f64,
    mode: &ProximityMode,
    q: &QuadratureSettings,
) -> Result<Integral, NevanlinnaError> {
    if !(r > 0.0) {
        return Err(NevanlinnaError::InvalidRadius(r));
    }
    let failure = RefCell::new(None);
    let result = circle_mean(
        |t| {
            let l = log_abs_on_circle(h, r, t, &failure);
            match mode {
                ProximityMode::LogPlus => l.max(0.0),
                ProximityMode::ReciprocalLogPlus => (-l).max(0.0),
                ProximityMode::ReciprocalNorm(w) => {
                    match w.log_metric(Complex64::from_polar(r, t)) {
                        Ok(g) => g - l,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            f64::NAN
                        }
                    }
                }
            }
        },
        q,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(result?)
}

/// Mean of `log|h|` over `|z| = r`.
pub fn circle_mean_log<H: Holomorphic + ?Sized>(h: &H, r: f64, q: &QuadratureSettings) -> Result<Integral, NevanlinnaError> {
    let failure = RefCell::new(None);
    let result = circle_mean(|t| log_abs_on_circle(h, r, t, &failure), q);
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(result?)
}

/// A meromorphic expression split into numerator and denominator, with zero
/// and pole ledgers up to a working radius.
#[derive(Debug, Clone)]
pub struct Meromorphic {
    pub expr: Expression,
    pub numerator: Expression,
    pub denominator: Expression,
    pub zeros: ZeroLedger,
    pub poles: ZeroLedger,
}

fn ledger_or_empty(e: &Expression, radius: f64, zs: &ZeroSettings) -> Result<ZeroLedger, NevanlinnaError> {
    if let Some(c) = e.constant_value() {
        if c == Complex64::new(0.0, 0.0) {
            return Err(ExprError::ZeroDenominator.into());
        }
        return Ok(ZeroLedger::empty(radius, e.fingerprint()));
    }
    if let crate::exprjet::Kind::Exp(_) = e.kind() {
        return Ok(ZeroLedger::empty(radius, e.fingerprint()));
    }
    Ok(find_zeros_with(e, radius, *zs)?)
}

/// Remove common zeros of numerator and denominator.
fn cancel(zeros: &mut Vec<ZeroRecord>, poles: &mut Vec<ZeroRecord>) {
    for p in poles.iter_mut() {
        for z in zeros.iter_mut() {
            if z.multiplicity == 0 || p.multiplicity == 0 {
                continue;
            }
            if (z.location - p.location).norm() <= 1e-7 * (1.0 + p.modulus) {
                let k = z.multiplicity.min(p.multiplicity);
                z.multiplicity -= k;
                p.multiplicity -= k;
            }
        }
    }
    zeros.retain(|r| r.multiplicity > 0);
    poles.retain(|r| r.multiplicity > 0);
}

impl Meromorphic {
    pub fn new(f: &Expression, radius: f64, zs: &ZeroSettings) -> Result<Meromorphic, NevanlinnaError> {
        let (numerator, denominator) = f.as_fraction()?;
        let mut zeros = ledger_or_empty(&numerator, radius, zs)?;
        let mut poles = ledger_or_empty(&denominator, radius, zs)?;
        cancel(&mut zeros.records, &mut poles.records);
        let radius = zeros.radius.min(poles.radius);
        zeros.radius = radius;
        poles.radius = radius;
        Ok(Meromorphic {
            expr: f.clone(),
            numerator,
            denominator,
            zeros,
            poles,
        })
    }

    /// Ledger radius; all radii passed to the methods must stay below it.
    pub fn radius(&self) -> f64 {
        self.zeros.radius
    }

    /// `m(r, F)`.
    pub fn proximity(&self, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
        Ok(proximity_m(&self.expr, r, &ProximityMode::LogPlus, q)?.value)
    }

    /// `m(r, 1/F)`.
    pub fn proximity_reciprocal(&self, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
        Ok(proximity_m(&self.expr, r, &ProximityMode::ReciprocalLogPlus, q)?.value)
    }

    /// `N(r, F)`, counting poles.
    pub fn pole_counting(&self, r: f64) -> Result<f64, NevanlinnaError> {
        Ok(self.poles.counting(r, None)?)
    }

    /// `N(r, 1/F)`, counting zeros.
    pub fn zero_counting(&self, r: f64, k: Option<u32>) -> Result<f64, NevanlinnaError> {
        Ok(self.zeros.counting(r, k)?)
    }

    /// `T(r, F) = m(r, F) + N(r, F)`.
    pub fn characteristic(&self, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
        Ok(self.proximity(r, q)? + self.pole_counting(r)?)
    }

    /// `T(r, 1/F) = m(r, 1/F) + N(r, 1/F)`.
    pub fn characteristic_reciprocal(&self, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
        Ok(self.proximity_reciprocal(r, q)? + self.zero_counting(r, None)?)
    }

    /// Order function for the Fubini-Study form: the circle average of
    /// `log sqrt(1+|F|^2)` minus its value at the origin, plus the pole
    /// counting function.
    pub fn spherical(&self, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
        let failure = RefCell::new(None);
        let mean = circle_mean(
            |t| 0.5 * softplus(2.0 * log_abs_on_circle(&self.expr, r, t, &failure)),
            q,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e.into());
        }
        let mean = mean?.value;
        let at0 = match self.expr.eval_scaled(Complex64::new(0.0, 0.0)) {
            Ok(v) => 0.5 * softplus(2.0 * v.ln_abs()),
            Err(ExprError::PoleAtPoint(_)) => return Err(NevanlinnaError::OriginOnDivisor),
            Err(e) => return Err(e.into()),
        };
        Ok(mean - at0 + self.pole_counting(r)?)
    }

    /// `(1/2pi) int log|F| - log|F(0)| - N0(r, 1/F) + N0(r, F)` with the
    /// counting functions normalized from 0; zero up to quadrature error.
    pub fn jensen_residual(&self, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
        if r > self.radius() * (1.0 + 1e-12) {
            return Err(super::ZeroError::RadiusExceedsLedger {
                radius: r,
                ledger_radius: self.radius(),
            }
            .into());
        }
        let f0 = match self.expr.eval_scaled(Complex64::new(0.0, 0.0)) {
            Ok(v) if !v.is_zero() => v.ln_abs(),
            Ok(_) | Err(ExprError::PoleAtPoint(_)) | Err(ExprError::ZeroAtPoint(_)) => {
                return Err(NevanlinnaError::OriginOnDivisor)
            }
            Err(e) => return Err(e.into()),
        };
        let mean = circle_mean_log(&self.expr, r, q)?.value;
        Ok(mean - f0 - self.zeros.jensen_counting(r) + self.poles.jensen_counting(r))
    }
}

/// `T(r, F)` with ledgers computed to radius `r`.
pub fn nevanlinna_t(f: &Expression, r: f64) -> Result<f64, NevanlinnaError> {
    let q = QuadratureSettings::default();
    Meromorphic::new(f, r, &ZeroSettings::default())?.characteristic(r, &q)
}

pub fn spherical_t(f: &Expression, r: f64) -> Result<f64, NevanlinnaError> {
    let q = QuadratureSettings::default();
    Meromorphic::new(f, r, &ZeroSettings::default())?.spherical(r, &q)
}

pub fn jensen_residual(f: &Expression, r: f64) -> Result<f64, NevanlinnaError> {
    let q = QuadratureSettings::default();
    Meromorphic::new(f, r, &ZeroSettings::default())?.jensen_residual(r, &q)
}

/// `m(r, F^(k)/F)`, the logarithmic-derivative proximity.
pub fn logderiv_m(f: &Expression, k: usize, r: f64, q: &QuadratureSettings) -> Result<f64, NevanlinnaError> {
    let ratio = Expression::quotient(f.differentiate_n(k), f.clone())?;
    Ok(proximity_m(&ratio, r, &ProximityMode::LogPlus, q)?.value)
}

/// `max_{|z|=r} log|h(z)|` by sampling followed by local golden-section
/// refinement.
pub fn max_log_modulus<H: Holomorphic + ?Sized>(h: &H, r: f64, samples: usize) -> Result<f64, NevanlinnaError> {
    let n = samples.max(16);
    let eval = |t: f64| -> Result<f64, NevanlinnaError> {
        match h.value(Complex64::from_polar(r, t)) {
            Ok(v) => Ok(v.ln_abs()),
            Err(ExprError::ZeroAtPoint(_)) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e.into()),
        }
    };
    let step = std::f64::consts::TAU / n as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let t = step * i as f64;
        let v = eval(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d)?;
        }
    }
    Ok(best.1.max(fc).max(fd))
}

/// One row of a characteristic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicRow {
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    /// Truncated counting functions `N_k` for the table's levels.
    pub truncated: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicTable {
    pub truncation_levels: Vec<u32>,
    pub rows: Vec<CharacteristicRow>,
}

impl CharacteristicTable {
    pub fn column(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let pick: Box<dyn Fn(&CharacteristicRow) -> f64> = match name {
            "T" => Box::new(|r| r.t),
            "m" => Box::new(|r| r.m),
            "N" => Box::new(|r| r.n),
            "residual" => Box::new(|r| r.residual),
            _ => {
                let k: u32 = name.strip_prefix("N_")?.parse().ok()?;
                let i = self.truncation_levels.iter().position(|&l| l == k)?;
                Box::new(move |r| r.truncated[i])
            }
        };
        Some(self.rows.iter().map(|r| (r.r, pick(r))).collect())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["r", "T", "m", "N"].iter().map(|s| s.to_string()).collect();
        h.extend(self.truncation_levels.iter().map(|k| format!("N_{k}")));
        h.push("residual".into());
        h
    }
}

/// Radii from `rmin` to `rmax` inclusive, uniform or geometric.
pub fn radius_grid(rmin: f64, rmax: f64, steps: usize, log_spaced: bool) -> Vec<f64> {
    if steps <= 1 {
        return vec![rmax];
    }
    (0..steps)
        .map(|i| {
            let s = i as f64 / (steps - 1) as f64;
            if log_spaced {
                (rmin.ln() + s * (rmax.ln() - rmin.ln())).exp()
            } else {
                rmin + s * (rmax - rmin)
            }
        })
        .collect()
}
