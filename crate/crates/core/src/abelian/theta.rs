//! The odd Jacobi theta function on `C / (Z + tau Z)`.
//!
//! We use
//!
//! ```text
//! theta(z) = sum_n exp(pi i (n + 1/2)^2 tau + 2 pi i (n + 1/2)(z + 1/2))
//!          = -2 sum_{n >= 0} (-1)^n q^{(n + 1/2)^2} sin((2n + 1) pi z),   q = exp(pi i tau),
//! ```
//!
//! which vanishes exactly on the lattice and satisfies
//!
//! ```text
//! theta(z + 1)   = -theta(z)
//! theta(z + k tau) = (-1)^k exp(-pi i k^2 tau - 2 pi i k z) theta(z).
//! ```
//!
//! Arguments are first reduced to the strip `|Im w| <= Im tau / 2`,
//! `|Re w| <= 1/2`; the automorphy factor is carried in log scale.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AbelianError;
use crate::exprjet::Scaled;

/// Terms are dropped once their bound on the reduced strip is below this.
const TAIL_EXPONENT: f64 = 42.0;

/// The lattice `Z + tau Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticLattice {
    pub tau: Complex64,
}

impl EllipticLattice {
    pub fn new(tau: Complex64) -> Result<EllipticLattice, AbelianError> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(AbelianError::InvalidLattice(tau));
        }
        Ok(EllipticLattice { tau })
    }

    /// `Z + i Z`.
    pub fn square() -> EllipticLattice {
        EllipticLattice {
            tau: Complex64::new(0.0, 1.0),
        }
    }

    pub fn covolume(&self) -> f64 {
        self.tau.im
    }

    /// Number of series terms (in `n >= 0`) needed on the reduced strip.
    pub fn terms(&self) -> usize {
        let y = self.tau.im;
        let mut n = 0usize;
        loop {
            let x = n as f64 + 0.5;
            if PI * y * (x * x - x) > TAIL_EXPONENT {
                return n;
            }
            n += 1;
        }
    }

    /// Writes `z = w + l + k tau` with `w` in the reduced cell.
    pub fn reduce(&self, z: Complex64) -> Result<(Complex64, i64, i64), AbelianError> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(AbelianError::TruncationInsufficient(z));
        }
        let k = (z.im / self.tau.im).round();
        let w1 = z - self.tau * k;
        let l = w1.re.round();
        let w = w1 - l;
        if w.im.abs() > 0.5 * self.tau.im * (1.0 + 1e-9) + 1e-12 {
            return Err(AbelianError::TruncationInsufficient(z));
        }
        Ok((w, l as i64, k as i64))
    }

    /// Series value and derivative at a reduced point.
    fn series(&self, w: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        for n in 0..=self.terms() {
            let x = n as f64 + 0.5;
            let qpow = (i * PI * x * x * self.tau).exp();
            let sign = if n % 2 == 0 { -2.0 } else { 2.0 };
            let arg = w * (2.0 * x * PI);
            value += qpow * arg.sin() * sign;
            deriv += qpow * arg.cos() * (sign * 2.0 * x * PI);
        }
        (value, deriv)
    }

    /// `log` of the automorphy factor taking `theta(w)` to `theta(w + l + k tau)`.
    fn automorphy(&self, w: Complex64, l: i64, k: i64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let kf = k as f64;
        -i * PI * kf * kf * self.tau - 2.0 * PI * i * kf * w + i * PI * ((k + l).rem_euclid(2) as f64)
    }

    /// `theta(z)` in log-scaled form.
    pub fn theta(&self, z: Complex64) -> Result<Scaled, AbelianError> {
        let (w, l, k) = self.reduce(z)?;
        let (v, _) = self.series(w);
        Ok(Scaled::exp_of(self.automorphy(w, l, k)).mul(Scaled::new(v)))
    }

    /// `theta(z)` and `theta'(z) / theta(z)`; the latter is `None` at a zero.
    pub fn theta_with_log_derivative(&self, z: Complex64) -> Result<(Scaled, Option<Complex64>), AbelianError> {
        let (w, l, k) = self.reduce(z)?;
        let (v, d) = self.series(w);
        let value = Scaled::exp_of(self.automorphy(w, l, k)).mul(Scaled::new(v));
        if v.re == 0.0 && v.im == 0.0 {
            return Ok((value, None));
        }
        let i = Complex64::new(0.0, 1.0);
        Ok((value, Some(d / v - 2.0 * PI * i * k as f64)))
    }

    /// `log ||theta(z)|| = log|theta(z)| - pi (Im z)^2 / Im tau`, invariant
    /// under translation by the lattice.
    pub fn log_norm(&self, z: Complex64) -> Result<f64, AbelianError> {
        Ok(self.theta(z)?.ln_abs() - PI * z.im * z.im / self.tau.im)
    }
}

/// Plain value of the odd theta function; overflows to infinity far from
/// the real axis, use [`EllipticLattice::theta`] there.
pub fn theta_eval(lattice: &EllipticLattice, z: Complex64) -> Result<Complex64, AbelianError> {
    Ok(lattice.theta(z)?.to_complex())
}
