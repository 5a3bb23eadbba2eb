//! Line-oriented text format.
//!
//! ```text
//! inputs p q
//! 0 input 0
//! 1 const -1/2
//! 2 mul 0 1
//! outputs 2
//! ```
//!
//! Gate lines are numbered consecutively from 0 and may only refer to
//! earlier gates. `#` starts a comment.

use std::fmt::Write;

use super::{Circuit, CircuitError, Gate, GateId};
use crate::algebra::{fmt_rational, parse_rational};

impl Circuit {
    pub fn to_text(&self, names: &[String]) -> String {
        let mut out = String::from("inputs");
        for k in 0..self.num_inputs {
            match names.get(k) {
                Some(n) => write!(out, " {n}").unwrap(),
                None => write!(out, " x{k}").unwrap(),
            }
        }
        out.push('\n');
        for (g, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Input(k) => writeln!(out, "{g} input {k}"),
                Gate::Const(c) => writeln!(out, "{g} const {}", fmt_rational(c)),
                Gate::Add(a, b) => writeln!(out, "{g} add {a} {b}"),
                Gate::Mul(a, b) => writeln!(out, "{g} mul {a} {b}"),
                Gate::Div(a, b) => writeln!(out, "{g} div {a} {b}"),
            }
            .unwrap();
        }
        out.push_str("outputs");
        for o in &self.outputs {
            write!(out, " {o}").unwrap();
        }
        out.push('\n');
        out
    }
}

/// Parses the text format; returns the circuit and its input names.
pub fn parse_circuit(text: &str) -> Result<(Circuit, Vec<String>), CircuitError> {
    let mut names: Option<Vec<String>> = None;
    let mut c = Circuit::new(0);
    // text ids map to hash-consed ids, which can differ on duplicate lines
    let mut map: Vec<GateId> = Vec::new();
    let mut outputs: Option<Vec<GateId>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| CircuitError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let head = words.next().unwrap();
        if head == "inputs" {
            if names.is_some() || !map.is_empty() {
                return Err(err("`inputs` must come first and only once".into()));
            }
            let ns: Vec<String> = words.map(str::to_string).collect();
            c = Circuit::new(ns.len());
            names = Some(ns);
            continue;
        }
        if names.is_none() {
            return Err(err("missing `inputs` line".into()));
        }
        let gate_ref = |w: Option<&str>, map: &[GateId]| -> Result<GateId, CircuitError> {
            let w = w.ok_or_else(|| err("missing operand".into()))?;
            let k: usize = w.parse().map_err(|_| err(format!("bad gate id {w:?}")))?;
            map.get(k).copied().ok_or_else(|| err(format!("gate {k} is not defined yet")))
        };
        if head == "outputs" {
            let mut outs = Vec::new();
            let rest: Vec<&str> = words.collect();
            for w in rest {
                outs.push(gate_ref(Some(w), &map)?);
            }
            outputs = Some(outs);
            continue;
        }
        let id: usize = head.parse().map_err(|_| err(format!("expected a gate id, got {head:?}")))?;
        if id != map.len() {
            return Err(err(format!("expected gate {}, got {id}", map.len())));
        }
        let kind = words.next().ok_or_else(|| err("missing gate kind".into()))?;
        let g = match kind {
            "input" => {
                let w = words.next().ok_or_else(|| err("missing input index".into()))?;
                let k: usize = w.parse().map_err(|_| err(format!("bad input index {w:?}")))?;
                if k >= c.num_inputs() {
                    return Err(err(format!("input {k} out of range")));
                }
                c.push(Gate::Input(k))
            }
            "const" => {
                let w = words.next().ok_or_else(|| err("missing constant".into()))?;
                c.push(Gate::Const(parse_rational(w).map_err(|e| err(e.to_string()))?))
            }
            "add" | "mul" | "div" => {
                let a = gate_ref(words.next(), &map)?;
                let b = gate_ref(words.next(), &map)?;
                c.push(match kind {
                    "add" => Gate::Add(a, b),
                    "mul" => Gate::Mul(a, b),
                    _ => Gate::Div(a, b),
                })
            }
            other => return Err(err(format!("unknown gate kind {other:?}"))),
        };
        if words.next().is_some() {
            return Err(err("trailing tokens".into()));
        }
        map.push(g);
    }
    let outs = outputs.ok_or(CircuitError::Parse { line: text.lines().count(), msg: "missing `outputs` line".into() })?;
    c.set_outputs(outs);
    Ok((c, names.unwrap_or_default()))
}
