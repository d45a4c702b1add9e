//! Log-scaled complex numbers and truncated Taylor series.
//!
//! Every value is stored as `mantissa * exp(log_scale)` with a real
//! `log_scale`. Entire functions like `exp(z^2)` leave the double range long
//! before the radii we care about, but their logarithmic modulus and their
//! phase stay perfectly representable.

use num_complex::Complex64;
use smallvec::SmallVec;

/// A complex number `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: Complex64::new(0.0, 0.0),
        log_scale: f64::NEG_INFINITY,
    };

    pub fn new(value: Complex64) -> Scaled {
        Scaled {
            mantissa: value,
            log_scale: 0.0,
        }
        .normalized()
    }

    /// `exp(w)` without overflow.
    pub fn exp_of(w: Complex64) -> Scaled {
        Scaled {
            mantissa: Complex64::from_polar(1.0, w.im),
            log_scale: w.re,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    fn normalized(self) -> Scaled {
        let a = self.mantissa.norm();
        if a == 0.0 || !a.is_finite() {
            if a == 0.0 {
                return Scaled::ZERO;
            }
            return self;
        }
        Scaled {
            mantissa: self.mantissa / a,
            log_scale: self.log_scale + a.ln(),
        }
    }

    /// `log|value|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.log_scale
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// The plain complex value; non-finite when it leaves the double range.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * self.log_scale.exp()
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let s = self.log_scale.max(other.log_scale);
        let m = self.mantissa * (self.log_scale - s).exp()
            + other.mantissa * (other.log_scale - s).exp();
        Scaled {
            mantissa: m,
            log_scale: s,
        }
        .normalized()
    }

    pub fn mul(self, other: Scaled) -> Scaled {
        if self.is_zero() || other.is_zero() {
            return Scaled::ZERO;
        }
        Scaled {
            mantissa: self.mantissa * other.mantissa,
            log_scale: self.log_scale + other.log_scale,
        }
        .normalized()
    }

    /// Division; `None` when the divisor is exactly zero.
    pub fn div(self, other: Scaled) -> Option<Scaled> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Scaled::ZERO);
        }
        Some(
            Scaled {
                mantissa: self.mantissa / other.mantissa,
                log_scale: self.log_scale - other.log_scale,
            }
            .normalized(),
        )
    }

    pub fn powi(self, k: i32) -> Option<Scaled> {
        if self.is_zero() {
            return if k > 0 {
                Some(Scaled::ZERO)
            } else if k == 0 {
                Some(Scaled::new(Complex64::new(1.0, 0.0)))
            } else {
                None
            };
        }
        Some(
            Scaled {
                mantissa: self.mantissa.powi(k),
                log_scale: self.log_scale * k as f64,
            }
            .normalized(),
        )
    }
}

pub(crate) type Coeffs = SmallVec<[Complex64; 4]>;

/// Truncated Taylor series `exp(log_scale) * sum c_j (z - a)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledJet {
    pub coeffs: Coeffs,
    pub log_scale: f64,
}

impl ScaledJet {
    pub fn constant(value: Complex64, order: usize) -> ScaledJet {
        let mut coeffs: Coeffs = SmallVec::from_elem(Complex64::new(0.0, 0.0), order + 1);
        coeffs[0] = value;
        ScaledJet {
            coeffs,
            log_scale: 0.0,
        }
        .normalized()
    }

    pub fn variable(at: Complex64, order: usize) -> ScaledJet {
        let mut coeffs: Coeffs = SmallVec::from_elem(Complex64::new(0.0, 0.0), order + 1);
        coeffs[0] = at;
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        ScaledJet {
            coeffs,
            log_scale: 0.0,
        }
        .normalized()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    fn normalized(mut self) -> ScaledJet {
        let mx = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if mx == 0.0 {
            self.log_scale = f64::NEG_INFINITY;
            return self;
        }
        if !mx.is_finite() {
            return self;
        }
        let inv = 1.0 / mx;
        for c in self.coeffs.iter_mut() {
            *c *= inv;
        }
        self.log_scale += mx.ln();
        self
    }

    pub fn value(&self) -> Scaled {
        if self.is_zero() {
            return Scaled::ZERO;
        }
        Scaled {
            mantissa: self.coeffs[0],
            log_scale: self.log_scale,
        }
    }

    /// Coefficient `j` as a scaled number.
    pub fn coefficient(&self, j: usize) -> Scaled {
        if self.is_zero() {
            return Scaled::ZERO;
        }
        Scaled {
            mantissa: self.coeffs[j],
            log_scale: self.log_scale,
        }
        .normalized()
    }

    pub fn add(&self, other: &ScaledJet) -> ScaledJet {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.log_scale.max(other.log_scale);
        let fa = (self.log_scale - s).exp();
        let fb = (other.log_scale - s).exp();
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * fa + b * fb)
            .collect();
        ScaledJet {
            coeffs,
            log_scale: s,
        }
        .normalized()
    }

    pub fn mul(&self, other: &ScaledJet) -> ScaledJet {
        let n = self.coeffs.len();
        if self.is_zero() || other.is_zero() {
            return ScaledJet::constant(Complex64::new(0.0, 0.0), n - 1);
        }
        let mut coeffs: Coeffs = SmallVec::from_elem(Complex64::new(0.0, 0.0), n);
        for i in 0..n {
            let a = self.coeffs[i];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for j in 0..n - i {
                coeffs[i + j] += a * other.coeffs[j];
            }
        }
        ScaledJet {
            coeffs,
            log_scale: self.log_scale + other.log_scale,
        }
        .normalized()
    }

    /// Series division; `None` when the divisor vanishes at the base point.
    pub fn div(&self, other: &ScaledJet) -> Option<ScaledJet> {
        let d0 = other.coeffs[0];
        if other.is_zero() || (d0.re == 0.0 && d0.im == 0.0) {
            return None;
        }
        let n = self.coeffs.len();
        if self.is_zero() {
            return Some(self.clone());
        }
        let mut q: Coeffs = SmallVec::from_elem(Complex64::new(0.0, 0.0), n);
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * q[k - j];
            }
            q[k] = acc / d0;
        }
        Some(
            ScaledJet {
                coeffs: q,
                log_scale: self.log_scale - other.log_scale,
            }
            .normalized(),
        )
    }

    pub fn powi(&self, k: i32) -> Option<ScaledJet> {
        let order = self.order();
        let mut result = ScaledJet::constant(Complex64::new(1.0, 0.0), order);
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k < 0 {
            ScaledJet::constant(Complex64::new(1.0, 0.0), order).div(&result)
        } else {
            Some(result)
        }
    }

    /// `exp` of this series. Needs the unscaled argument, so it fails (returns
    /// `None`) when the argument itself is not representable.
    pub fn exp(&self) -> Option<ScaledJet> {
        let n = self.coeffs.len();
        let w: Coeffs = if self.is_zero() {
            SmallVec::from_elem(Complex64::new(0.0, 0.0), n)
        } else {
            let f = self.log_scale.exp();
            self.coeffs.iter().map(|c| c * f).collect()
        };
        if w.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return None;
        }
        let mut b: Coeffs = SmallVec::from_elem(Complex64::new(0.0, 0.0), n);
        b[0] = Complex64::from_polar(1.0, w[0].im);
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += w[j] * b[k - j] * j as f64;
            }
            b[k] = acc / k as f64;
        }
        Some(
            ScaledJet {
                coeffs: b,
                log_scale: w[0].re,
            }
            .normalized(),
        )
    }

    /// Plain coefficients; `None` on overflow.
    pub fn to_plain(&self) -> Option<Vec<Complex64>> {
        if self.is_zero() {
            return Some(self.coeffs.to_vec());
        }
        let f = self.log_scale.exp();
        let out: Vec<Complex64> = self.coeffs.iter().map(|c| c * f).collect();
        if out.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Some(out)
        } else {
            None
        }
    }
}
