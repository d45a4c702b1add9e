//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::QuadratureError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Absolute tolerance on the integral.
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
    pub min_width: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-7,
            initial_panels: 24,
            max_panels: 6000,
            min_width: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut finite = fc.is_finite();
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        finite &= s.is_finite();
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let error = if finite { ((kron - gauss) * h).abs() } else { f64::INFINITY };
    Panel { a, b, value, error }
}

/// Integral of `f` over `[a, b]`.
///
/// Panels are refined largest-error first until the summed error estimate is
/// below `abs_tol`. Running out of panels, or reaching panels narrower than
/// `min_width` that still carry error, yields [`QuadratureError::Failure`]
/// with the best value found.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, s: &QuadratureSettings) -> Result<Integral, QuadratureError> {
    let n0 = s.initial_panels.max(1);
    let w = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    for i in 0..n0 {
        let lo = a + w * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + w };
        heap.push(gk15(&f, lo, hi));
    }
    let mut panels = n0;
    loop {
        let err: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
        let value: f64 = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
        if err <= s.abs_tol && value.is_finite() {
            return Ok(Integral { value, error: err, panels });
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadratureError::Failure {
                best: value,
                error: err,
            });
        };
        if panels >= s.max_panels {
            heap.push(worst);
            return Err(QuadratureError::Failure { best: value, error: err });
        }
        if worst.b - worst.a < s.min_width {
            // Cannot refine further; keep its contribution and move on.
            if !worst.value.is_finite() {
                return Err(QuadratureError::Failure { best: value, error: err });
            }
            frozen_value += worst.value;
            frozen_error += worst.error;
            if frozen_error > s.abs_tol {
                return Err(QuadratureError::Failure { best: value, error: err });
            }
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
        panels += 1;
    }
}

/// Mean of a function of the angle over the circle, `(1/2pi) int_0^{2pi}`.
/// The tolerance in `s` applies to the mean.
pub fn circle_mean<F: Fn(f64) -> f64>(f: F, s: &QuadratureSettings) -> Result<Integral, QuadratureError> {
    let scaled = QuadratureSettings {
        abs_tol: s.abs_tol * TAU,
        ..*s
    };
    match integrate(f, 0.0, TAU, &scaled) {
        Ok(i) => Ok(Integral {
            value: i.value / TAU,
            error: i.error / TAU,
            panels: i.panels,
        }),
        Err(QuadratureError::Failure { best, error }) => Err(QuadratureError::Failure {
            best: best / TAU,
            error: error / TAU,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_high_degree_polynomials() {
        let s = QuadratureSettings {
            initial_panels: 1,
            ..Default::default()
        };
        let p = gk15(&|x: f64| x.powi(20), -1.0, 1.0);
        assert!((p.value - 2.0 / 21.0).abs() < 1e-15);
        let i = integrate(|x| x.powi(12) + 3.0 * x, 0.0, 1.0, &s).unwrap();
        assert!((i.value - (1.0 / 13.0 + 1.5)).abs() < 1e-14);
    }

    #[test]
    fn logarithmic_singularity_on_the_circle() {
        // mean of log|1 - e^{i t}| over the circle is 0
        let m = circle_mean(
            |t| {
                let v = (1.0 - t.cos()).hypot(t.sin());
                if v == 0.0 {
                    0.0
                } else {
                    v.ln()
                }
            },
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert!(m.value.abs() < 1e-6, "{}", m.value);
    }

    #[test]
    fn panel_budget_exhaustion_reports_best_value() {
        let s = QuadratureSettings {
            abs_tol: 1e-14,
            initial_panels: 2,
            max_panels: 4,
            min_width: 1e-9,
        };
        let r = integrate(|x| (50.0 * x).sin().abs(), 0.0, 1.0, &s);
        assert!(matches!(r, Err(QuadratureError::Failure { .. })));
    }
}
