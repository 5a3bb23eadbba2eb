//! Value polynomials of acyclic models by backward substitution.

use crate::algebra::Polynomial;
use crate::pmc::{Pmc, StateId};

use super::ValueError;

/// Support size above which an intermediate value is refused.
pub const ACYCLIC_SUPPORT_LIMIT: usize = 100_000;

/// `g_s = sum_t P(s, t) g_t` in reverse topological order.
///
/// Only extremal states may carry self-loops; any other cycle is
/// [`ValueError::Cyclic`].
pub fn acyclic_value_polynomials(pmc: &Pmc) -> Result<Vec<Polynomial>, ValueError> {
    if !pmc.is_normal_form() {
        return Err(ValueError::NotNormalForm);
    }
    let n = pmc.n();
    let mut indeg = vec![0usize; n];
    for s in (0..n).filter(|&s| !pmc.is_extremal(s)) {
        for e in pmc.row(s) {
            indeg[e.to] += 1;
        }
    }
    let mut stack: Vec<StateId> = (0..n).filter(|&s| indeg[s] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = stack.pop() {
        order.push(s);
        if pmc.is_extremal(s) {
            continue;
        }
        for e in pmc.row(s) {
            indeg[e.to] -= 1;
            if indeg[e.to] == 0 {
                stack.push(e.to);
            }
        }
    }
    if order.len() != n {
        return Err(ValueError::Cyclic);
    }
    let mut g = vec![Polynomial::zero(); n];
    g[pmc.target()] = Polynomial::one();
    for &s in order.iter().rev() {
        if pmc.is_extremal(s) {
            continue;
        }
        let mut acc = Polynomial::zero();
        for e in pmc.row(s) {
            if !g[e.to].is_zero() {
                acc = &acc + &pmc.poly(e.poly).checked_mul(&g[e.to])?;
            }
        }
        if acc.support_size() > ACYCLIC_SUPPORT_LIMIT {
            return Err(ValueError::SupportTooLarge(acc.support_size()));
        }
        g[s] = acc;
    }
    Ok(g)
}
