pub mod abelian;
pub mod cli;
pub mod divisor_analysis;
pub mod exprjet;
pub mod nevanlinna;
pub mod semitorus;
