//! Literal-product rewriting, the ABP to simple-pMC compiler and the
//! derivative pipeline.

mod chonev;
mod compile;
mod pipeline;

pub use chonev::{chonev_nonneg_certificate, chonev_rewrite, ChonevForm, ChonevTerm, Literal};
pub use compile::{abp_to_pmc, AbpPmc};
pub use pipeline::{derivative_pmc, Check, DerivativePmc, Route, Stage, SAMPLED_CHECK_POINTS, SYMBOLIC_CHECK_VERTICES};

use thiserror::Error;

use crate::abp::{AbpError, AbpViolation};
use crate::algebra::AlgebraError;
use crate::circuit::CircuitError;
use crate::valuefn::{NumericError, ValueError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivError {
    #[error("program is not layered with linear labels: {0:?}")]
    InvalidAbp(Vec<AbpViolation>),
    #[error("state index {0} is out of range for {1} states")]
    State(usize, usize),
    #[error("parameter index {0} is out of range for {1} parameters")]
    Param(usize, usize),
    #[error("{0} disagrees with the value function")]
    Mismatch(&'static str),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Abp(#[from] AbpError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
