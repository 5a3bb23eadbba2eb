//! Arithmetic circuits over the rationals.
//!
//! Gates are hash-consed and stored in topological order: every gate only
//! refers to gates with a smaller id. Subtraction is `a + (-1)*b`.

mod depth;
mod divisions;
mod reverse;
mod text;

pub use depth::depth_bound;
pub use text::parse_circuit;

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::algebra::{AlgebraError, Polynomial, Rational};

pub type GateId = usize;

/// Largest support any intermediate polynomial may reach during expansion.
pub const EXPAND_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(usize),
    Const(Rational),
    Add(GateId, GateId),
    Mul(GateId, GateId),
    Div(GateId, GateId),
}

impl Gate {
    fn operands(&self) -> Option<(GateId, GateId)> {
        match *self {
            Gate::Add(a, b) | Gate::Mul(a, b) | Gate::Div(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("division by zero at gate {0}")]
    DivisionByZero(GateId),
    #[error("circuit contains division gates")]
    HasDivisions,
    #[error("{0} exceeds the limit of {1}")]
    TooLarge(&'static str, usize),
    #[error("no point with a non-zero denominator found")]
    NoNonzeroPoint,
    #[error("rewritten circuit disagrees with its input at a test point")]
    Mismatch,
    #[error("circuit has {0} outputs, expected {1}")]
    OutputCount(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, Default)]
pub struct Circuit {
    num_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
    index: HashMap<Gate, GateId>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.num_inputs == other.num_inputs && self.gates == other.gates && self.outputs == other.outputs
    }
}

impl Circuit {
    pub fn new(num_inputs: usize) -> Self {
        Circuit { num_inputs, ..Default::default() }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g]
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    pub fn set_outputs(&mut self, outs: Vec<GateId>) {
        assert!(outs.iter().all(|&g| g < self.gates.len()), "output refers to a missing gate");
        self.outputs = outs;
    }

    pub fn has_divisions(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::Div(..)))
    }

    fn push(&mut self, g: Gate) -> GateId {
        if let Some(&id) = self.index.get(&g) {
            return id;
        }
        let id = self.gates.len();
        self.gates.push(g.clone());
        self.index.insert(g, id);
        id
    }

    fn as_const(&self, g: GateId) -> Option<&Rational> {
        match &self.gates[g] {
            Gate::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn input(&mut self, k: usize) -> GateId {
        assert!(k < self.num_inputs, "input {k} out of range");
        self.push(Gate::Input(k))
    }

    pub fn constant(&mut self, c: Rational) -> GateId {
        self.push(Gate::Const(c))
    }

    pub fn zero(&mut self) -> GateId {
        self.constant(Rational::zero())
    }

    pub fn one(&mut self) -> GateId {
        self.constant(Rational::one())
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => {
                let s = x + y;
                self.constant(s)
            }
            (Some(x), _) if x.is_zero() => b,
            (_, Some(y)) if y.is_zero() => a,
            _ => self.push(Gate::Add(a.min(b), a.max(b))),
        }
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => {
                let s = x * y;
                self.constant(s)
            }
            (Some(x), _) | (_, Some(x)) if x.is_zero() => self.zero(),
            (Some(x), _) if x.is_one() => b,
            (_, Some(y)) if y.is_one() => a,
            _ => self.push(Gate::Mul(a.min(b), a.max(b))),
        }
    }

    /// `a / b`; only constant folding when `b` is a non-zero constant.
    pub fn div(&mut self, a: GateId, b: GateId) -> GateId {
        match (self.as_const(a), self.as_const(b)) {
            (_, Some(y)) if y.is_one() => a,
            (Some(x), Some(y)) if !y.is_zero() => {
                let q = x / y;
                self.constant(q)
            }
            _ => self.push(Gate::Div(a, b)),
        }
    }

    pub fn neg(&mut self, a: GateId) -> GateId {
        let m = self.constant(-Rational::one());
        self.mul(m, a)
    }

    pub fn sub(&mut self, a: GateId, b: GateId) -> GateId {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    pub fn scale(&mut self, c: &Rational, a: GateId) -> GateId {
        let k = self.constant(c.clone());
        self.mul(k, a)
    }

    /// Balanced binary sum; the empty sum is the constant 0.
    pub fn sum(&mut self, items: &[GateId]) -> GateId {
        match items.len() {
            0 => self.zero(),
            1 => items[0],
            n => {
                let (l, r) = items.split_at(n / 2);
                let a = self.sum(l);
                let b = self.sum(r);
                self.add(a, b)
            }
        }
    }

    /// Balanced binary product; the empty product is the constant 1.
    pub fn product(&mut self, items: &[GateId]) -> GateId {
        match items.len() {
            0 => self.one(),
            1 => items[0],
            n => {
                let (l, r) = items.split_at(n / 2);
                let a = self.product(l);
                let b = self.product(r);
                self.mul(a, b)
            }
        }
    }

    pub fn pow(&mut self, a: GateId, e: u32) -> GateId {
        if e == 0 {
            return self.one();
        }
        let half = self.pow(a, e / 2);
        let sq = self.mul(half, half);
        if e % 2 == 1 {
            self.mul(sq, a)
        } else {
            sq
        }
    }

    /// Sum of monomials, powers by repeated squaring.
    pub fn polynomial(&mut self, p: &Polynomial) -> GateId {
        let terms: Vec<GateId> = p
            .terms()
            .map(|(m, c)| {
                let mut factors = vec![self.constant(c.clone())];
                for &(k, e) in m.pairs() {
                    let x = self.input(k as usize);
                    factors.push(self.pow(x, e));
                }
                self.product(&factors)
            })
            .collect();
        self.sum(&terms)
    }

    /// Copies the cone of `roots` in `other`, with input `k` replaced by
    /// `inputs[k]`. Returns the images of `roots`.
    pub fn import(&mut self, other: &Circuit, inputs: &[GateId], roots: &[GateId]) -> Vec<GateId> {
        let live = other.cone(roots);
        let mut map = vec![usize::MAX; other.size()];
        for (g, gate) in other.gates.iter().enumerate() {
            if !live[g] {
                continue;
            }
            map[g] = match gate {
                Gate::Input(k) => inputs[*k],
                Gate::Const(c) => self.constant(c.clone()),
                Gate::Add(a, b) => self.add(map[*a], map[*b]),
                Gate::Mul(a, b) => self.mul(map[*a], map[*b]),
                Gate::Div(a, b) => self.div(map[*a], map[*b]),
            };
        }
        roots.iter().map(|&r| map[r]).collect()
    }

    /// Gates that some root depends on.
    fn cone(&self, roots: &[GateId]) -> Vec<bool> {
        let mut live = vec![false; self.size()];
        for &r in roots {
            live[r] = true;
        }
        for g in (0..self.size()).rev() {
            if live[g] {
                if let Some((a, b)) = self.gates[g].operands() {
                    live[a] = true;
                    live[b] = true;
                }
            }
        }
        live
    }

    /// The subcircuit computing `outs`, with unused gates dropped.
    pub fn with_outputs(&self, outs: &[GateId]) -> Circuit {
        let mut c = Circuit::new(self.num_inputs);
        let inputs: Vec<GateId> = (0..self.num_inputs).map(|k| c.input(k)).collect();
        let roots = c.import(self, &inputs, outs);
        c.set_outputs(roots);
        c.prune()
    }

    /// Drops gates outside the cone of the outputs, renumbering the rest.
    pub fn prune(&self) -> Circuit {
        let live = self.cone(&self.outputs);
        let mut c = Circuit::new(self.num_inputs);
        let mut map = vec![usize::MAX; self.size()];
        for (g, gate) in self.gates.iter().enumerate() {
            if !live[g] {
                continue;
            }
            let ng = match gate {
                Gate::Add(a, b) => Gate::Add(map[*a], map[*b]),
                Gate::Mul(a, b) => Gate::Mul(map[*a], map[*b]),
                Gate::Div(a, b) => Gate::Div(map[*a], map[*b]),
                other => other.clone(),
            };
            map[g] = c.push(ng);
        }
        c.outputs = self.outputs.iter().map(|&o| map[o]).collect();
        c
    }

    /// Longest path from a leaf, per gate; leaves have depth 0.
    pub fn gate_depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.size()];
        for (g, gate) in self.gates.iter().enumerate() {
            if let Some((a, b)) = gate.operands() {
                d[g] = 1 + d[a].max(d[b]);
            }
        }
        d
    }

    pub fn depth(&self) -> usize {
        let d = self.gate_depths();
        self.outputs.iter().map(|&o| d[o]).max().unwrap_or(0)
    }

    /// Formal degree per gate: inputs 1, constants 0, max over sums, sum over products.
    pub fn gate_degrees(&self) -> Result<Vec<u64>, CircuitError> {
        let mut d = vec![0u64; self.size()];
        for (g, gate) in self.gates.iter().enumerate() {
            d[g] = match *gate {
                Gate::Input(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(a, b) => d[a].max(d[b]),
                Gate::Mul(a, b) => d[a] + d[b],
                Gate::Div(..) => return Err(CircuitError::HasDivisions),
            };
        }
        Ok(d)
    }

    /// Formal degree of every output.
    pub fn syntactic_degree(&self) -> Result<Vec<u64>, CircuitError> {
        let d = self.gate_degrees()?;
        Ok(self.outputs.iter().map(|&o| d[o]).collect())
    }

    pub fn eval_gates(&self, v: &[Rational]) -> Result<Vec<Rational>, CircuitError> {
        if v.len() < self.num_inputs {
            return Err(AlgebraError::DimensionMismatch { needed: self.num_inputs - 1, got: v.len() }.into());
        }
        let mut val: Vec<Rational> = Vec::with_capacity(self.size());
        for (g, gate) in self.gates.iter().enumerate() {
            let x = match gate {
                Gate::Input(k) => v[*k].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add(a, b) => &val[*a] + &val[*b],
                Gate::Mul(a, b) => &val[*a] * &val[*b],
                Gate::Div(a, b) => {
                    if val[*b].is_zero() {
                        return Err(CircuitError::DivisionByZero(g));
                    }
                    &val[*a] / &val[*b]
                }
            };
            val.push(x);
        }
        Ok(val)
    }

    pub fn eval(&self, v: &[Rational]) -> Result<Vec<Rational>, CircuitError> {
        let val = self.eval_gates(v)?;
        Ok(self.outputs.iter().map(|&o| val[o].clone()).collect())
    }

    /// The polynomial computed by every output of a division-free circuit.
    pub fn expand_to_polynomial(&self) -> Result<Vec<Polynomial>, CircuitError> {
        let live = self.cone(&self.outputs);
        let mut val: Vec<Option<Polynomial>> = vec![None; self.size()];
        for (g, gate) in self.gates.iter().enumerate() {
            if !live[g] {
                continue;
            }
            let get = |k: usize| val[k].as_ref().expect("operand precedes gate");
            let p = match gate {
                Gate::Input(k) => Polynomial::var(*k),
                Gate::Const(c) => Polynomial::constant(c.clone()),
                Gate::Add(a, b) => get(*a) + get(*b),
                Gate::Mul(a, b) => get(*a).checked_mul(get(*b))?,
                Gate::Div(..) => return Err(CircuitError::HasDivisions),
            };
            if p.support_size() > EXPAND_LIMIT {
                return Err(CircuitError::TooLarge("expanded support", EXPAND_LIMIT));
            }
            val[g] = Some(p);
        }
        Ok(self.outputs.iter().map(|&o| val[o].clone().expect("output is live")).collect())
    }

    /// Rewrites every constant using only the constants -1, 0 and 1: integers
    /// by binary expansion with doubling, fractions by one division.
    pub fn unit_constants(&self) -> Circuit {
        let mut c = Circuit::new(self.num_inputs);
        let inputs: Vec<GateId> = (0..self.num_inputs).map(|k| c.input(k)).collect();
        let mut map = vec![usize::MAX; self.size()];
        for (g, gate) in self.gates.iter().enumerate() {
            map[g] = match gate {
                Gate::Input(k) => inputs[*k],
                Gate::Const(r) => {
                    let n = c.unit_integer(r.numer());
                    if r.denom().is_one() {
                        n
                    } else {
                        let d = c.unit_integer(r.denom());
                        c.push(Gate::Div(n, d))
                    }
                }
                // pushed directly: folding would reintroduce general constants
                Gate::Add(a, b) => c.push(Gate::Add(map[*a], map[*b])),
                Gate::Mul(a, b) => c.push(Gate::Mul(map[*a], map[*b])),
                Gate::Div(a, b) => c.push(Gate::Div(map[*a], map[*b])),
            };
        }
        c.outputs = self.outputs.iter().map(|&o| map[o]).collect();
        c
    }

    fn unit_integer(&mut self, n: &num_bigint::BigInt) -> GateId {
        let one = self.push(Gate::Const(Rational::one()));
        if n.is_zero() {
            return self.push(Gate::Const(Rational::zero()));
        }
        let mut acc = one;
        let bits = n.abs().to_str_radix(2);
        for bit in bits.chars().skip(1) {
            acc = self.push(Gate::Add(acc, acc));
            if bit == '1' {
                acc = self.push(Gate::Add(acc, one));
            }
        }
        if n.is_negative() {
            let m = self.push(Gate::Const(-Rational::one()));
            acc = self.push(Gate::Mul(m, acc));
        }
        acc
    }
}

/// A point with coordinates `a / b`, `|a| < 2^15` and `0 < b < 2^16`.
pub fn random_point<R: Rng>(rng: &mut R, m: usize) -> Vec<Rational> {
    (0..m)
        .map(|_| {
            let a: i64 = rng.gen_range(-(1 << 15)..(1 << 15));
            let b: i64 = rng.gen_range(1..(1 << 16));
            Rational::new(a.into(), b.into())
        })
        .collect()
}

/// Circuit with one output per polynomial.
pub fn from_polynomials(polys: &[Polynomial], num_inputs: usize) -> Circuit {
    let mut c = Circuit::new(num_inputs);
    let outs: Vec<GateId> = polys.iter().map(|p| c.polynomial(p)).collect();
    c.set_outputs(outs);
    c
}

#[cfg(test)]
mod tests;
