//! Never-worse and monotonicity questions as three-valued verdicts.
//!
//! Both exact problems are hard, so nothing here claims to decide them:
//! samples can only refute, certificates can only confirm, and everything
//! else is `Unknown`.

mod check;
mod gadgets;

pub use check::{check_monotone, check_nwr, Method};
pub use gadgets::{mono_to_nwr, nwr_gadget, MonoReduction};

use num_traits::Zero;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{Polynomial, Rational, RationalFunction, Valuation};
use crate::circuit::CircuitError;
use crate::derivpmc::DerivError;
use crate::pmc::{Pmc, SampleError, StateId};
use crate::valuefn::{acyclic_value_polynomials, evaluate_values, value_functions, NumericError, ValueError};

/// Models up to this size get symbolic value functions.
pub const SYMBOLIC_STATES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("state index {0} is out of range for {1} states")]
    State(usize, usize),
    #[error("parameter index {0} is out of range for {1} parameters")]
    Param(usize, usize),
    #[error("the two states must differ")]
    SameState,
    #[error("state {} is the target or the sink", .0 + 1)]
    Extremal(usize),
    #[error("{0}")]
    Inapplicable(&'static str),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `g_i(v) > g_j(v)`.
    Point(Valuation),
    /// `g(lower) > g(upper)` with `upper - lower` a positive multiple of `e_k`.
    Pair(Valuation, Valuation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    /// Carries the name of the certificate.
    CertifiedYes(String),
    RefutedNo(Witness),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub samples_used: usize,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self.status {
            Status::CertifiedYes(_) => "CertifiedYes",
            Status::RefutedNo(_) => "RefutedNo",
            Status::Unknown => "Unknown",
        }
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.status, Status::RefutedNo(_))
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.status, Status::CertifiedYes(_))
    }

    /// Witness valuations are objects from parameter name to exact rational.
    pub fn to_json(&self, params: &[String]) -> Value {
        let val = |v: &Valuation| {
            let map: Map<String, Value> =
                params.iter().zip(v).map(|(n, x)| (n.clone(), Value::String(x.to_string()))).collect();
            Value::Object(map)
        };
        let (certificate, witness) = match &self.status {
            Status::CertifiedYes(c) => (json!(c), Value::Null),
            Status::RefutedNo(Witness::Point(v)) => (Value::Null, json!({ "valuation": val(v) })),
            Status::RefutedNo(Witness::Pair(a, b)) => (Value::Null, json!({ "lower": val(a), "upper": val(b) })),
            Status::Unknown => (Value::Null, Value::Null),
        };
        json!({
            "status": self.name(),
            "certificate": certificate,
            "witness": witness,
            "samples_used": self.samples_used,
        })
    }
}

/// Value functions in whichever form is affordable.
pub(crate) enum Values {
    Symbolic(Vec<RationalFunction>),
    /// Acyclic models: the values are polynomials.
    Polynomial(Vec<Polynomial>),
    Numeric,
}

impl Values {
    pub(crate) fn new(pmc: &Pmc) -> Result<Values, RelationError> {
        match acyclic_value_polynomials(pmc) {
            Ok(g) => return Ok(Values::Polynomial(g)),
            Err(ValueError::Cyclic | ValueError::SupportTooLarge(_)) => {}
            Err(e) => return Err(e.into()),
        }
        if pmc.n() <= SYMBOLIC_STATES {
            return Ok(Values::Symbolic(value_functions(pmc)?));
        }
        Ok(Values::Numeric)
    }

    pub(crate) fn at(&self, pmc: &Pmc, v: &[Rational], states: &[StateId]) -> Result<Vec<Rational>, RelationError> {
        let map = |e: crate::algebra::AlgebraError| RelationError::Numeric(e.into());
        match self {
            Values::Symbolic(g) => states.iter().map(|&s| g[s].eval(v).map_err(map)).collect(),
            Values::Polynomial(g) => states.iter().map(|&s| g[s].eval(v).map_err(map)).collect(),
            Values::Numeric => {
                let all = evaluate_values(pmc, v)?;
                Ok(states.iter().map(|&s| all[s].clone()).collect())
            }
        }
    }

    pub(crate) fn function(&self, s: StateId) -> Option<RationalFunction> {
        match self {
            Values::Symbolic(g) => Some(g[s].clone()),
            Values::Polynomial(g) => Some(RationalFunction::from_poly(g[s].clone())),
            Values::Numeric => None,
        }
    }
}

/// `num` multiplied by the sign `den` takes at `v`; on a connected region
/// where `den` never vanishes this has the sign of `num / den` throughout.
pub(crate) fn sign_normalized(f: &RationalFunction, v: &[Rational]) -> Option<Polynomial> {
    let d = f.den.eval(v).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(if d > Rational::zero() { f.num.clone() } else { -f.num.clone() })
}

pub(crate) fn check_state(pmc: &Pmc, s: StateId) -> Result<(), RelationError> {
    if s >= pmc.n() {
        return Err(RelationError::State(s, pmc.n()));
    }
    Ok(())
}
