//! Exact reachability probabilities at a single valuation.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Rational};
use crate::pmc::{Pmc, PolyId, StateId};

/// Dense elimination is refused above this many undetermined states.
pub const NUMERIC_LIMIT: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("instantiated system is singular")]
    Singular,
    #[error("{0} states on cycles exceed the numeric limit of {NUMERIC_LIMIT}")]
    TooLarge(usize),
}

/// Probability of reaching the target from every state under `v`.
///
/// Models that are acyclic apart from self-loops are solved backwards in
/// topological order; anything else goes through exact Gaussian elimination
/// after states that cannot reach the target are fixed to 0.
pub fn evaluate_values(pmc: &Pmc, v: &[Rational]) -> Result<Vec<Rational>, NumericError> {
    let n = pmc.n();
    let mut cache: HashMap<PolyId, Rational> = HashMap::new();
    let mut rows: Vec<Vec<(StateId, Rational)>> = Vec::with_capacity(n);
    for s in 0..n {
        let mut row = Vec::with_capacity(pmc.row(s).len());
        for e in pmc.row(s) {
            let x = match cache.get(&e.poly) {
                Some(x) => x.clone(),
                None => {
                    let x = pmc.poly(e.poly).eval(v)?;
                    cache.insert(e.poly, x.clone());
                    x
                }
            };
            if !x.is_zero() {
                row.push((e.to, x));
            }
        }
        rows.push(row);
    }
    let fixed = |s: StateId| {
        if s == pmc.target() {
            Some(Rational::one())
        } else if s == pmc.sink() {
            Some(Rational::zero())
        } else {
            None
        }
    };

    if let Some(order) = topological(n, &rows) {
        let mut g = vec![Rational::zero(); n];
        for &s in order.iter().rev() {
            if let Some(x) = fixed(s) {
                g[s] = x;
                continue;
            }
            let mut stay = Rational::zero();
            let mut acc = Rational::zero();
            for (t, x) in &rows[s] {
                if *t == s {
                    stay += x;
                } else {
                    acc += x * &g[*t];
                }
            }
            let leave = Rational::one() - stay;
            // a state that keeps all its mass never reaches the target
            g[s] = if leave.is_zero() { Rational::zero() } else { acc / leave };
        }
        return Ok(g);
    }

    // states that can reach the target through non-zero edges
    let mut back: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (s, row) in rows.iter().enumerate() {
        if fixed(s).is_some() {
            continue;
        }
        for (t, _) in row {
            back[*t].push(s);
        }
    }
    let mut reach = vec![false; n];
    let mut stack = vec![pmc.target()];
    reach[pmc.target()] = true;
    while let Some(t) = stack.pop() {
        for &s in &back[t] {
            if !reach[s] {
                reach[s] = true;
                stack.push(s);
            }
        }
    }
    let unknown: Vec<StateId> = (0..n).filter(|&s| reach[s] && fixed(s).is_none()).collect();
    if unknown.len() > NUMERIC_LIMIT {
        return Err(NumericError::TooLarge(unknown.len()));
    }
    let mut index = vec![usize::MAX; n];
    for (k, &s) in unknown.iter().enumerate() {
        index[s] = k;
    }
    let u = unknown.len();
    let mut m = vec![vec![Rational::zero(); u + 1]; u];
    for (k, &s) in unknown.iter().enumerate() {
        m[k][k] = Rational::one();
        for (t, x) in &rows[s] {
            if *t == pmc.target() {
                m[k][u] += x;
            } else if index[*t] != usize::MAX {
                m[k][index[*t]] -= x;
            }
        }
    }
    let sol = solve_dense(m)?;
    let mut g: Vec<Rational> = (0..n).map(|s| fixed(s).unwrap_or_else(Rational::zero)).collect();
    for (k, &s) in unknown.iter().enumerate() {
        g[s] = sol[k].clone();
    }
    Ok(g)
}

/// Topological order of the graph without self-loops, if it is acyclic.
fn topological(n: usize, rows: &[Vec<(StateId, Rational)>]) -> Option<Vec<StateId>> {
    let mut indeg = vec![0usize; n];
    for (s, row) in rows.iter().enumerate() {
        for (t, _) in row {
            if *t != s {
                indeg[*t] += 1;
            }
        }
    }
    let mut queue: Vec<StateId> = (0..n).filter(|&s| indeg[s] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = queue.pop() {
        order.push(s);
        for (t, _) in &rows[s] {
            if *t != s {
                indeg[*t] -= 1;
                if indeg[*t] == 0 {
                    queue.push(*t);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Gauss-Jordan on an augmented `u x (u+1)` matrix.
fn solve_dense(mut m: Vec<Vec<Rational>>) -> Result<Vec<Rational>, NumericError> {
    let u = m.len();
    for k in 0..u {
        let r = (k..u).find(|&r| !m[r][k].is_zero()).ok_or(NumericError::Singular)?;
        m.swap(k, r);
        let inv = Rational::one() / &m[k][k];
        for j in k..=u {
            let x = &m[k][j] * &inv;
            m[k][j] = x;
        }
        let pivot = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k || row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for j in k..=u {
                if !pivot[j].is_zero() {
                    let x = &f * &pivot[j];
                    row[j] -= x;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[u].clone()).collect())
}
