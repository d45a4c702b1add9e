use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{classify_finite_order, exp_characteristic, GrowthOrder};
use super::{Compactification, CompactifiedDivisor, SemiTorusCurve, SemiTorusError};
use crate::exprjet::{Expression, Scaled};
use crate::nevanlinna::{
    circle_mean, find_zeros_with, fit, log_sum_exp, order_estimate, proximity_m, CharacteristicRow,
    CharacteristicTable, NevanlinnaError, NormWeights, ProximityMode, QuadratureSettings, RegressionModel,
    RegressionSummary, ZeroLedger, ZeroSettings,
};

const PROBES: [Complex64; 3] = [
    Complex64::new(0.318_309_886, 0.271_828_182),
    Complex64::new(-0.577_215_664, 0.141_421_356),
    Complex64::new(0.123_456_789, -0.662_607_015),
];

/// `true` when the pulled-back section vanishes identically, judged against
/// the size of its individual terms at a few probe points.
fn vanishes_identically(pullback: &Expression) -> Result<bool, SemiTorusError> {
    if pullback.is_zero_constant() {
        return Ok(true);
    }
    let terms: Vec<Expression> = match pullback.kind() {
        crate::exprjet::Kind::Sum(t) => t.clone(),
        _ => vec![pullback.clone()],
    };
    for z in PROBES {
        let mut scale = f64::NEG_INFINITY;
        for t in &terms {
            scale = scale.max(t.eval_scaled(z)?.ln_abs());
        }
        let jet = pullback.scaled_jet(z, 8)?;
        let size = jet.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if size > 0.0 && jet.log_scale + size.ln() > scale + (1e-12f64).ln() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Curve and divisor together with the pulled-back zero ledger, valid for
/// radii up to the ledger radius.
#[derive(Debug, Clone)]
pub struct DivisorPairing {
    pub curve: SemiTorusCurve,
    pub divisor: CompactifiedDivisor,
    pub pullback: Expression,
    pub weights: NormWeights,
    pub ledger: ZeroLedger,
    pub quadrature: QuadratureSettings,
}

impl DivisorPairing {
    pub fn new(
        curve: SemiTorusCurve,
        divisor: CompactifiedDivisor,
        r_max: f64,
        zeros: &ZeroSettings,
        quadrature: QuadratureSettings,
    ) -> Result<DivisorPairing, SemiTorusError> {
        let pullback = divisor.pullback(&curve)?;
        if vanishes_identically(&pullback)? {
            return Err(SemiTorusError::CurveInsideDivisor);
        }
        let ledger = pullback_ledger_of(&pullback, r_max, zeros)?;
        let weights = divisor.norm_weights(&curve);
        Ok(DivisorPairing {
            curve,
            divisor,
            pullback,
            weights,
            ledger,
            quadrature,
        })
    }

    /// `T_f(r; c_1(D))`: `sum_j d_j T(r, exp(L_j))` on `(P^1)^p`, and `d`
    /// times the Fubini-Study order function on `P^p`.
    pub fn order_t(&self, r: f64) -> Result<f64, SemiTorusError> {
        match &self.divisor.compactification {
            Compactification::ProductOfLines { multidegree } => {
                let mut t = 0.0;
                for (j, d) in multidegree.iter().enumerate() {
                    if *d > 0 {
                        t += *d as f64 * exp_characteristic(&self.curve.exponent(j), r, &self.quadrature)?;
                    }
                }
                Ok(t)
            }
            Compactification::Projective { degree } => {
                let mut exps = vec![Expression::real(0.0)];
                exps.extend(self.curve.exponents());
                Ok(*degree as f64 * fubini_study_t(&exps, r, &self.quadrature)?)
            }
        }
    }

    /// `m_f(r; D)`.
    pub fn proximity(&self, r: f64) -> Result<f64, SemiTorusError> {
        Ok(proximity_m(
            &self.pullback,
            r,
            &ProximityMode::ReciprocalNorm(self.weights.clone()),
            &self.quadrature,
        )?
        .value)
    }

    /// `N_k(r; f^*D)`, untruncated for `k = None`.
    pub fn counting(&self, r: f64, k: Option<u32>) -> Result<f64, SemiTorusError> {
        Ok(self.ledger.counting(r, k).map_err(NevanlinnaError::from)?)
    }

    /// `T - N - m`, bounded by the first main theorem.
    pub fn fmt_residual(&self, r: f64) -> Result<f64, SemiTorusError> {
        Ok(self.order_t(r)? - self.counting(r, None)? - self.proximity(r)?)
    }

    pub fn order(&self) -> GrowthOrder {
        classify_finite_order(&self.curve)
    }

    /// Rows for each radius, computed in parallel.
    pub fn table(&self, grid: &[f64], truncation_levels: &[u32]) -> Result<CharacteristicTable, SemiTorusError> {
        let rows: Vec<Result<CharacteristicRow, SemiTorusError>> = grid
            .par_iter()
            .map(|&r| {
                let t = self.order_t(r)?;
                let m = self.proximity(r)?;
                let n = self.counting(r, None)?;
                let truncated = truncation_levels
                    .iter()
                    .map(|k| self.counting(r, Some(*k)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(CharacteristicRow {
                    r,
                    t,
                    m,
                    n,
                    truncated,
                    residual: t - n - m,
                })
            })
            .collect();
        Ok(CharacteristicTable {
            truncation_levels: truncation_levels.to_vec(),
            rows: rows.into_iter().collect::<Result<_, _>>()?,
        })
    }

    /// Defect from the table, with the growth exponent of the regression
    /// taken from the curve's order.
    pub fn defect(
        &self,
        table: &CharacteristicTable,
        k: Option<u32>,
        window: Option<(f64, f64)>,
    ) -> Result<DefectEstimate, SemiTorusError> {
        let rho = match self.order() {
            GrowthOrder::Finite(r) => r as f64,
            GrowthOrder::Infinite => {
                let est = order_estimate(&table.column("T").expect("T column"))?;
                (2.0 * est.slope).round() / 2.0
            }
        };
        defect_from_table(table, k, rho, window)
    }
}

fn pullback_ledger_of(pullback: &Expression, r_max: f64, zeros: &ZeroSettings) -> Result<ZeroLedger, SemiTorusError> {
    if pullback.constant_value().is_some() {
        return Ok(ZeroLedger::empty(r_max, pullback.fingerprint()));
    }
    Ok(find_zeros_with(pullback, r_max, *zeros).map_err(NevanlinnaError::from)?)
}

/// Zero ledger of `sigma` pulled back along `curve`, up to radius `r_max`.
pub fn pullback_ledger(curve: &SemiTorusCurve, divisor: &CompactifiedDivisor, r_max: f64) -> Result<ZeroLedger, SemiTorusError> {
    let pullback = divisor.pullback(curve)?;
    if vanishes_identically(&pullback)? {
        return Err(SemiTorusError::CurveInsideDivisor);
    }
    pullback_ledger_of(&pullback, r_max, &ZeroSettings::default())
}

/// Order function of `z -> [exp(L_0) : ... : exp(L_n)]` for the Fubini-Study
/// form: `(1/4pi) int log sum |exp L_j|^2 - (1/2) log sum |exp L_j(0)|^2`.
pub fn fubini_study_t(exponents: &[Expression], r: f64, q: &QuadratureSettings) -> Result<f64, SemiTorusError> {
    let log_norm = |z: Complex64| -> f64 {
        let logs: Vec<f64> = exponents
            .iter()
            .map(|e| e.eval_scaled(z).map(|v| 2.0 * v.to_complex().re).unwrap_or(f64::NAN))
            .collect();
        0.5 * log_sum_exp(&logs)
    };
    let mean = circle_mean(|t| log_norm(Complex64::from_polar(r, t)), q).map_err(NevanlinnaError::from)?;
    Ok(mean.value - log_norm(Complex64::new(0.0, 0.0)))
}

/// `1 - limsup N_k/T`, estimated from regression slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEstimate {
    pub k: Option<u32>,
    pub value: f64,
    /// Smallest and largest value over the full window and its two halves.
    pub band: (f64, f64),
    pub window: (f64, f64),
    pub t_fit: RegressionSummary,
    pub n_fit: RegressionSummary,
}

fn slope_ratio(
    t: &[(f64, f64)],
    n: &[(f64, f64)],
    model: RegressionModel,
    window: Option<(f64, f64)>,
) -> Result<(f64, RegressionSummary, RegressionSummary), NevanlinnaError> {
    let tf = fit(t, model, window)?;
    let nf = fit(n, model, window)?;
    if !(tf.slope > 0.0) {
        return Err(NevanlinnaError::DegenerateWindow("order function does not grow".into()));
    }
    Ok((1.0 - nf.slope / tf.slope, tf, nf))
}

/// Defect from tabulated `T` and `N_k` with both regressed on `r^rho`.
pub fn defect_from_table(
    table: &CharacteristicTable,
    k: Option<u32>,
    rho: f64,
    window: Option<(f64, f64)>,
) -> Result<DefectEstimate, SemiTorusError> {
    let t = table.column("T").expect("T column");
    let name = match k {
        Some(k) => format!("N_{k}"),
        None => "N".to_string(),
    };
    let n = table
        .column(&name)
        .ok_or_else(|| NevanlinnaError::DegenerateWindow(format!("table has no {name} column")))?;
    defect_from_samples(&t, &n, k, rho, window)
}

pub fn defect_from_samples(
    t: &[(f64, f64)],
    n: &[(f64, f64)],
    k: Option<u32>,
    rho: f64,
    window: Option<(f64, f64)>,
) -> Result<DefectEstimate, SemiTorusError> {
    let model = RegressionModel::Power(rho);
    let (value, t_fit, n_fit) = slope_ratio(t, n, model, window)?;
    let (lo, hi) = (t_fit.r_min, t_fit.r_max);
    let mid = (lo * hi).sqrt();
    let mut band = (value, value);
    for w in [(lo, mid), (mid, hi)] {
        if let Ok((v, _, _)) = slope_ratio(t, n, model, Some(w)) {
            band = (band.0.min(v), band.1.max(v));
        }
    }
    Ok(DefectEstimate {
        k,
        value,
        band,
        window: (lo, hi),
        t_fit,
        n_fit,
    })
}

/// `log ||sigma(f(z))||` for the pairing's weights at a point.
pub fn log_norm_along(pairing: &DivisorPairing, z: Complex64) -> Result<f64, SemiTorusError> {
    let s: Scaled = pairing.pullback.eval_scaled(z)?;
    if s.is_zero() {
        return Err(SemiTorusError::OnDivisor);
    }
    Ok(s.ln_abs() - pairing.weights.log_metric(z)?)
}
