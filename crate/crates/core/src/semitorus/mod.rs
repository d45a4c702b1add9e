//! Curves in semi-tori and divisors on their compactifications.
//!
//! A curve is given by its lift `z -> (exp(2 pi i F_j(z)), G_k(z))`. Divisors
//! live on `(C*)^p` and are closed up either in `(P^1)^p` with a multidegree
//! or in `P^p`. Pulling a section back along the curve yields an exponential
//! sum in the expression grammar, so all counting goes through the certified
//! zero finder.

mod curve;
mod divisor;
mod pairing;

pub use curve::{
    classify_finite_order, construct_positive_defect, exp_characteristic, order_function_t,
    rational_approximation, ConstructedCurve, GrowthOrder, OrderFunction, Presentation, SemiTorusCurve,
};
pub use divisor::{Compactification, CompactifiedDivisor};
pub use pairing::{
    defect_from_samples, defect_from_table, fubini_study_t, log_norm_along, pullback_ledger, DefectEstimate,
    DivisorPairing,
};

use thiserror::Error;

use crate::exprjet::ExprError;
use crate::nevanlinna::NevanlinnaError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemiTorusError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid divisor: {0}")]
    ConstructionError(String),
    #[error("point lies on the divisor")]
    OnDivisor,
    #[error("the curve lies inside the divisor")]
    CurveInsideDivisor,
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error(transparent)]
    Nevanlinna(#[from] NevanlinnaError),
    #[error(transparent)]
    Expression(#[from] ExprError),
}

#[cfg(test)]
mod tests;
