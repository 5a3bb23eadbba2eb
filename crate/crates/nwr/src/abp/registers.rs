//! Circuits to width-4 programs by simulating three registers.
//!
//! `prog(f, j, k, s)` is a straight-line program with the net effect
//! `R_j += s * f * R_k`, leaving the other registers as they were:
//!
//! ```text
//! leaf:  R_j += s * leaf * R_k
//! g + h: prog(g, j, k, s); prog(h, j, k, s)
//! g * h: prog(g, j, l, -s); prog(h, l, k, 1); prog(g, j, l, s); prog(h, l, k, -1)
//! ```
//!
//! where `l` is the third register. A circuit of depth `e` gives at most
//! `4^e` instructions. Each instruction becomes one layer holding the three
//! registers and a unit vertex; register `r` keeps its value through an
//! edge labelled 1 and the instruction adds the edge `R_k -> R_j`.

use std::collections::HashMap;

use super::{Abp, AbpError};
use crate::algebra::Polynomial;
use crate::circuit::{Circuit, Gate, GateId};

/// Deeper circuits are refused; their programs have up to `4^depth` layers.
pub const MAX_CIRCUIT_DEPTH: usize = 24;
/// Largest program built, in vertices.
pub const VERTEX_LIMIT: usize = 10_000_000;

#[derive(Clone, Debug)]
struct Instr {
    j: usize,
    k: usize,
    neg: bool,
    leaf: GateId,
}

fn length(c: &Circuit, g: GateId, memo: &mut HashMap<GateId, usize>) -> usize {
    if let Some(&n) = memo.get(&g) {
        return n;
    }
    let n = match *c.gate(g) {
        Gate::Input(_) | Gate::Const(_) => 1,
        Gate::Add(a, b) => length(c, a, memo).saturating_add(length(c, b, memo)),
        Gate::Mul(a, b) => 2usize.saturating_mul(length(c, a, memo).saturating_add(length(c, b, memo))),
        Gate::Div(..) => 0,
    };
    memo.insert(g, n);
    n
}

fn prog(c: &Circuit, g: GateId, j: usize, k: usize, neg: bool, out: &mut Vec<Instr>) {
    match *c.gate(g) {
        Gate::Input(_) | Gate::Const(_) => out.push(Instr { j, k, neg, leaf: g }),
        Gate::Add(a, b) => {
            prog(c, a, j, k, neg, out);
            prog(c, b, j, k, neg, out);
        }
        Gate::Mul(a, b) => {
            let l = 3 - j - k;
            prog(c, a, j, l, !neg, out);
            prog(c, b, l, k, false, out);
            prog(c, a, j, l, neg, out);
            prog(c, b, l, k, true, out);
        }
        Gate::Div(..) => unreachable!("rejected before"),
    }
}

/// Width-4 program computing the single output of a division-free circuit.
pub fn circuit_to_abp(c: &Circuit, params: Vec<String>) -> Result<Abp, AbpError> {
    if c.outputs().len() != 1 {
        return Err(AbpError::OutputCount(c.outputs().len()));
    }
    if c.has_divisions() {
        return Err(AbpError::HasDivisions);
    }
    let depth = c.depth();
    if depth > MAX_CIRCUIT_DEPTH {
        return Err(AbpError::TooDeep(depth));
    }
    let out = c.outputs()[0];
    let len = length(c, out, &mut HashMap::new());
    let vertices = len.saturating_add(1).saturating_mul(4).saturating_add(1);
    if vertices > VERTEX_LIMIT {
        return Err(AbpError::TooLarge("program vertices", VERTEX_LIMIT));
    }
    let mut instrs = Vec::with_capacity(len);
    prog(c, out, 0, 1, false, &mut instrs);
    debug_assert_eq!(instrs.len(), len);

    // layer 0: the unit; layer 1: unit and registers with R_1 = 1
    let mut a = Abp::new(params, len + 1);
    let unit0 = a.source();
    let mut unit = a.add_vertex(1);
    a.add_edge(unit0, unit, Polynomial::one());
    let mut regs = [a.add_vertex(1), a.add_vertex(1), a.add_vertex(1)];
    a.add_edge(unit0, regs[1], Polynomial::one());
    let leaf_label = |g: GateId, neg: bool| {
        let p = match c.gate(g) {
            Gate::Input(k) => Polynomial::var(*k),
            Gate::Const(r) => Polynomial::constant(r.clone()),
            _ => unreachable!(),
        };
        if neg {
            -p
        } else {
            p
        }
    };
    for (t, ins) in instrs.iter().enumerate() {
        let layer = t + 2;
        let last = t + 1 == len;
        let next_unit = a.add_vertex(layer);
        a.add_edge(unit, next_unit, Polynomial::one());
        let next: [usize; 3] = if last {
            // the sink stands in for R_0 of the final layer
            [a.sink(), a.add_vertex(layer), a.add_vertex(layer)]
        } else {
            [a.add_vertex(layer), a.add_vertex(layer), a.add_vertex(layer)]
        };
        for r in 0..3 {
            a.add_edge(regs[r], next[r], Polynomial::one());
        }
        a.add_edge(regs[ins.k], next[ins.j], leaf_label(ins.leaf, ins.neg));
        unit = next_unit;
        regs = next;
    }
    let a = a.prune();
    debug_assert!(a.width() <= 4);
    Ok(a)
}

/// Number of register instructions for the output of `c`.
pub fn instruction_count(c: &Circuit) -> usize {
    c.outputs().first().map_or(0, |&o| length(c, o, &mut HashMap::new()))
}
