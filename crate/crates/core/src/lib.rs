//! Exact expected-utility construction over sheaves of variable lotteries.
//!
//! The stage space is either a finite poset (Alexandrov topology) or a closed
//! rational interval. Truth values of preference assertions are open sets,
//! sections are exact piecewise-linear rational functions, and the
//! representation pipeline builds expected-utility weights by Dedekind-cut
//! calibration, glues them across covers, or reports where that is impossible.

pub mod forcing;
pub mod lottery;
pub mod preference;
pub mod rational;
pub mod representation;
pub mod scenario;
pub mod sections;
pub mod topology;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unresolved name: {0}")]
    Unresolved(String),
    #[error("invalid: {0}")]
    Invalid(String),
    #[error("space mismatch: {0}")]
    Mismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not piecewise-linear: {0}")]
    NonLinear(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
