//! The two reductions between never-worse and monotonicity questions.

use num_traits::{One, Signed, Zero};

use super::{check_state, RelationError};
use crate::algebra::{Polynomial, Rational};
use crate::derivpmc::DerivativePmc;
use crate::pmc::{Pmc, StateId};
use crate::valuefn::acyclic_value_polynomials;

/// A copy of `pmc` with one extra state and no edges from it. Models in
/// normal form keep it: the new state goes right before the sink.
fn with_fresh_state(pmc: &Pmc, label: &str) -> (Pmc, StateId) {
    let n = pmc.n();
    if !pmc.is_normal_form() {
        let mut out = pmc.clone();
        let s = out.add_state(Some(label.to_string()));
        return (out, s);
    }
    let fresh = n - 2;
    let map = |s: StateId| if s < fresh { s } else { s + 1 };
    let mut out = Pmc::new(pmc.params().to_vec(), n + 1, map(pmc.target()), map(pmc.sink()));
    for (i, j, p) in pmc.transitions() {
        if !pmc.is_extremal(i) {
            out.add_transition(map(i), map(j), p.clone());
        }
    }
    if !pmc.labels().is_empty() {
        let mut labels: Vec<String> = pmc.labels().to_vec();
        labels.insert(fresh, label.to_string());
        out.set_labels(labels);
    }
    out.set_initial(pmc.initial().map(map));
    (out, fresh)
}

fn fresh_name(params: &[String]) -> String {
    let mut name = format!("x{}", params.len() + 1);
    while params.contains(&name) {
        name.push('\'');
    }
    name
}

/// A new state `s` moving to `j` with a fresh parameter `x` and to `i`
/// otherwise, so `g_s = x g_j + (1 - x) g_i`. It increases in `x` from `s`
/// exactly when `i ⊴ j`. Returns the model, `s` and the index of `x`; ids of
/// the input are shifted by one from the sink on when it is in normal form.
pub fn nwr_gadget(pmc: &Pmc, i: StateId, j: StateId) -> Result<(Pmc, StateId, usize), RelationError> {
    check_state(pmc, i)?;
    check_state(pmc, j)?;
    if i == j {
        return Err(RelationError::SameState);
    }
    for s in [i, j] {
        if pmc.is_extremal(s) {
            return Err(RelationError::Extremal(s));
        }
    }
    let shift = |s: StateId| if pmc.is_normal_form() && s >= pmc.n() - 2 { s + 1 } else { s };
    let (mut out, s) = with_fresh_state(pmc, "gadget");
    let x = out.add_param(fresh_name(pmc.params()));
    let px = Polynomial::var(x);
    out.add_transition(s, shift(j), px.clone());
    out.add_transition(s, shift(i), &Polynomial::one() - &px);
    Ok((out, s, x))
}

#[derive(Clone, Debug)]
pub enum MonoReduction {
    /// Decided from the sign of `β / N` alone.
    Decided(bool),
    /// `β / N = -1` and `g' ≡ 1` could not be checked.
    Undecided,
    /// Monotone exactly when `s ⊴ probe` in `pmc`.
    Query { pmc: Pmc, s: StateId, probe: StateId },
}

/// The derivative is `P / D` with `D > 0` and `P = β + N g'(probe)`, so
/// monotonicity is `g'(probe) >= -β/N` everywhere. A new state reaching the
/// target with the constant `-β/N` turns that into a never-worse query.
pub fn mono_to_nwr(d: &DerivativePmc) -> MonoReduction {
    let ratio = &d.beta / Rational::from_integer(d.n.clone());
    if !ratio.is_negative() {
        return MonoReduction::Decided(true);
    }
    let minus_one = -Rational::one();
    if ratio < minus_one {
        // g' <= 1 everywhere
        return MonoReduction::Decided(false);
    }
    if ratio == minus_one {
        return match acyclic_value_polynomials(&d.pmc) {
            Ok(g) => MonoReduction::Decided(g[d.probe].is_one()),
            Err(_) => MonoReduction::Undecided,
        };
    }
    let (mut pmc, s) = with_fresh_state(&d.pmc, "threshold");
    let up = -ratio;
    let down = Rational::one() - &up;
    debug_assert!(!up.is_zero() && !down.is_zero());
    pmc.add_transition(s, pmc.target(), Polynomial::constant(up));
    pmc.add_transition(s, pmc.sink(), Polynomial::constant(down));
    let probe = if d.probe >= s { d.probe + 1 } else { d.probe };
    MonoReduction::Query { pmc, s, probe }
}
