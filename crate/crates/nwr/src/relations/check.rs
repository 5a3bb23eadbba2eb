//! Sampling and certificate engines.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gadgets::{mono_to_nwr, MonoReduction};
use super::{check_state, sign_normalized, RelationError, Status, Values, Verdict, Witness};
use crate::algebra::{Rational, RationalFunction, Valuation};
use crate::derivpmc::{chonev_nonneg_certificate, derivative_pmc};
use crate::pmc::{is_graph_preserving, sample_with, Pmc, PmcKind, StateId};
use crate::valuefn::evaluate_values;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sampling,
    DerivativePmc,
    Certificate,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sampling => "sampling",
            Method::DerivativePmc => "derivative-pmc",
            Method::Certificate => "certificate",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sampling" => Ok(Method::Sampling),
            "derivative-pmc" => Ok(Method::DerivativePmc),
            "certificate" => Ok(Method::Certificate),
            _ => Err(format!("unknown method {s:?}, expected sampling, derivative-pmc or certificate")),
        }
    }
}

fn verdict(status: Status, samples_used: usize) -> Verdict {
    Verdict { status, samples_used }
}

/// `g_i <= g_j` at every graph-preserving valuation.
///
/// Samples `budget` valuations and refutes on the first one where `g_i`
/// exceeds `g_j`, after recomputing both values directly. Otherwise, for
/// simple models whose value functions are available, `g_j - g_i` is
/// brought to a single numerator and given to the literal-product
/// certificate.
pub fn check_nwr(pmc: &Pmc, i: StateId, j: StateId, budget: usize, seed: u64) -> Result<Verdict, RelationError> {
    check_state(pmc, i)?;
    check_state(pmc, j)?;
    if i == j {
        return Ok(verdict(Status::CertifiedYes("reflexive".into()), 0));
    }
    let kind = PmcKind::detect(pmc);
    let values = Values::new(pmc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = None;
    for k in 0..budget {
        let v = sample_with(pmc, kind, &mut rng)?;
        let g = values.at(pmc, &v, &[i, j])?;
        if g[0] > g[1] {
            let direct = evaluate_values(pmc, &v)?;
            if direct[i] > direct[j] {
                return Ok(verdict(Status::RefutedNo(Witness::Point(v)), k + 1));
            }
        }
        first.get_or_insert(v);
    }
    if !kind.simple {
        return Ok(verdict(Status::Unknown, budget));
    }
    let (Some(gi), Some(gj)) = (values.function(i), values.function(j)) else {
        return Ok(verdict(Status::Unknown, budget));
    };
    let h = RationalFunction { num: &(&gj.num * &gi.den) - &(&gi.num * &gj.den), den: &gi.den * &gj.den };
    let at = match first {
        Some(v) => v,
        None => sample_with(pmc, kind, &mut rng)?,
    };
    match sign_normalized(&h, &at) {
        Some(p) if chonev_nonneg_certificate(&p) => {
            Ok(verdict(Status::CertifiedYes("literal-product certificate on g_j - g_i".into()), budget))
        }
        _ => Ok(verdict(Status::Unknown, budget)),
    }
}

/// Smallest shift tried is `2^-EPS_MAX`.
const EPS_MIN: u32 = 4;
const EPS_MAX: u32 = 12;
/// Shifts refused as not graph-preserving before a valuation is given up.
const SHIFT_TRIES: usize = 8;

/// Whether `g_i` never decreases along `e_k` between graph-preserving valuations.
pub fn check_monotone(
    pmc: &Pmc,
    i: StateId,
    k: usize,
    budget: usize,
    seed: u64,
    method: Method,
) -> Result<Verdict, RelationError> {
    check_state(pmc, i)?;
    if k >= pmc.num_params() {
        return Err(RelationError::Param(k, pmc.num_params()));
    }
    if pmc.is_extremal(i) {
        return Ok(verdict(Status::CertifiedYes("constant value".into()), 0));
    }
    match method {
        Method::Sampling => sample_monotone(pmc, i, k, budget, seed),
        Method::Certificate => certify_monotone(pmc, i, k),
        Method::DerivativePmc => derivative_monotone(pmc, i, k, budget, seed),
    }
}

fn shifted(v: &Valuation, k: usize, eps: &Rational) -> Valuation {
    let mut w = v.clone();
    w[k] += eps;
    w
}

fn sample_monotone(pmc: &Pmc, i: StateId, k: usize, budget: usize, seed: u64) -> Result<Verdict, RelationError> {
    let kind = PmcKind::detect(pmc);
    let values = Values::new(pmc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0;
    for _ in 0..budget {
        let v = sample_with(pmc, kind, &mut rng)?;
        let pair = (0..SHIFT_TRIES).find_map(|_| {
            let e: u32 = rng.gen_range(EPS_MIN..=EPS_MAX);
            let w = shifted(&v, k, &Rational::new(1.into(), BigInt::one() << e));
            is_graph_preserving(pmc, &w).then_some(w)
        });
        let Some(w) = pair else { continue };
        used += 1;
        let lo = values.at(pmc, &v, &[i])?.remove(0);
        let hi = values.at(pmc, &w, &[i])?.remove(0);
        if lo > hi && decreases(pmc, i, &v, &w)? {
            return Ok(verdict(Status::RefutedNo(Witness::Pair(v, w)), used));
        }
    }
    Ok(verdict(Status::Unknown, used))
}

/// Direct recheck of `g_i(v) > g_i(w)`.
fn decreases(pmc: &Pmc, i: StateId, v: &[Rational], w: &[Rational]) -> Result<bool, RelationError> {
    Ok(evaluate_values(pmc, v)?[i] > evaluate_values(pmc, w)?[i])
}

fn certify_monotone(pmc: &Pmc, i: StateId, k: usize) -> Result<Verdict, RelationError> {
    let kind = PmcKind::detect(pmc);
    if !kind.simple {
        return Err(RelationError::Inapplicable("the certificate needs a simple model"));
    }
    let Some(g) = Values::new(pmc)?.function(i) else {
        return Ok(verdict(Status::Unknown, 0));
    };
    // the quotient-rule denominator is a square
    let d = g.partial_derivative(k);
    if chonev_nonneg_certificate(&d.num) {
        return Ok(verdict(Status::CertifiedYes("literal-product certificate on the derivative numerator".into()), 0));
    }
    Ok(verdict(Status::Unknown, 0))
}

fn derivative_monotone(pmc: &Pmc, i: StateId, k: usize, budget: usize, seed: u64) -> Result<Verdict, RelationError> {
    let kind = PmcKind::detect(pmc);
    if !kind.simple {
        return Err(RelationError::Inapplicable("the derivative criterion needs a simple model"));
    }
    let d = derivative_pmc(pmc, i, k)?;
    match mono_to_nwr(&d) {
        MonoReduction::Decided(true) => {
            Ok(verdict(Status::CertifiedYes("derivative chain with beta/N >= 0".into()), 0))
        }
        MonoReduction::Decided(false) => {
            // P < 0 on the whole box, so any shift refutes
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = sample_with(pmc, kind, &mut rng)?;
            Ok(refute_near(pmc, i, k, &v, 1)?.unwrap_or(verdict(Status::Unknown, 1)))
        }
        MonoReduction::Undecided => Ok(verdict(Status::Unknown, 0)),
        MonoReduction::Query { pmc: query, s, probe } => {
            let v = check_nwr(&query, s, probe, budget, seed)?;
            match v.status {
                Status::CertifiedYes(c) => {
                    Ok(verdict(Status::CertifiedYes(format!("derivative chain, {c}")), v.samples_used))
                }
                // the derivative is negative at the witness; look for a decreasing pair there
                Status::RefutedNo(Witness::Point(w)) | Status::RefutedNo(Witness::Pair(w, _)) => {
                    Ok(refute_near(pmc, i, k, &w, v.samples_used)?.unwrap_or(verdict(Status::Unknown, v.samples_used)))
                }
                Status::Unknown => Ok(verdict(Status::Unknown, v.samples_used)),
            }
        }
    }
}

/// A decreasing pair around `v` along `e_k`, for a point where the
/// derivative is negative.
fn refute_near(pmc: &Pmc, i: StateId, k: usize, v: &Valuation, used: usize) -> Result<Option<Verdict>, RelationError> {
    for e in EPS_MIN..=40 {
        let eps = Rational::new(1.into(), BigInt::one() << e);
        for (lo, hi) in [(v.clone(), shifted(v, k, &eps)), (shifted(v, k, &-eps.clone()), v.clone())] {
            if is_graph_preserving(pmc, &lo) && is_graph_preserving(pmc, &hi) && decreases(pmc, i, &lo, &hi)? {
                return Ok(Some(verdict(Status::RefutedNo(Witness::Pair(lo, hi)), used)));
            }
        }
    }
    Ok(None)
}
