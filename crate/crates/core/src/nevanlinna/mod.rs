//! Value distribution of holomorphic and meromorphic functions of one
//! variable: certified zero ledgers, counting functions, proximity and
//! characteristic functions, and growth fits.

mod characteristic;
mod growth;
mod quadrature;
mod zeros;

pub use characteristic::{
    circle_mean_log, jensen_residual, log_sum_exp, logderiv_m, max_log_modulus, nevanlinna_t,
    proximity_m, radius_grid, softplus, spherical_t, CharacteristicRow, CharacteristicTable,
    Meromorphic, NormWeights, ProximityMode,
};
pub use growth::{
    band, borel_check, fit, least_squares, log_ratio_bound, order_estimate, BandSummary,
    BorelReport, RegressionModel, RegressionSummary, Tabulated,
};
pub use quadrature::{circle_mean, integrate, Integral, QuadratureSettings};
pub use zeros::{find_zeros, find_zeros_with, winding_number_circle, ZeroLedger, ZeroRecord, ZeroSettings};

use num_complex::Complex64;
use thiserror::Error;

use crate::exprjet::{ExprError, Expression, Scaled};

/// A function that can be evaluated in log-scaled form together with its
/// logarithmic derivative.
pub trait Holomorphic: Sync {
    fn value(&self, z: Complex64) -> Result<Scaled, ExprError>;

    /// Value and `h'(z)/h(z)`; [`ExprError::ZeroAtPoint`] at an exact zero.
    fn value_and_log_derivative(&self, z: Complex64) -> Result<(Scaled, Complex64), ExprError>;

    /// Stable identifier, recorded in zero ledgers.
    fn fingerprint(&self) -> String;
}

impl Holomorphic for Expression {
    fn value(&self, z: Complex64) -> Result<Scaled, ExprError> {
        self.eval_scaled(z)
    }

    fn value_and_log_derivative(&self, z: Complex64) -> Result<(Scaled, Complex64), ExprError> {
        Expression::value_and_log_derivative(self, z)
    }

    fn fingerprint(&self) -> String {
        Expression::fingerprint(self)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroError {
    #[error("zero at {location} lies on the circle |z| = {radius}")]
    BoundaryZero { radius: f64, location: Complex64 },
    #[error("subdivision did not isolate the zeros near {center} (half-width {half_width}, winding {winding})")]
    NonConvergence {
        center: Complex64,
        half_width: f64,
        winding: u32,
    },
    #[error("zero on the integration path near {0}")]
    ZeroOnPath(Complex64),
    #[error("negative winding number {winding} near {center}; the function has poles")]
    NegativeWinding { center: Complex64, winding: i64 },
    #[error("radius {radius} exceeds the ledger radius {ledger_radius}")]
    RadiusExceedsLedger { radius: f64, ledger_radius: f64 },
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
    #[error(transparent)]
    Evaluation(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not reach tolerance (best value {best}, error estimate {error})")]
    Failure { best: f64, error: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NevanlinnaError {
    #[error(transparent)]
    Zeros(#[from] ZeroError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Expression(#[from] ExprError),
    #[error("the origin lies on the divisor")]
    OriginOnDivisor,
    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
}

#[cfg(test)]
mod tests;
