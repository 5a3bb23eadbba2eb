//! Layered algebraic branching programs with labels of degree at most one.
//!
//! The program computes the sum over source-to-sink paths of the product of
//! the edge labels. Every edge goes from layer `i` to layer `i + 1`.

mod registers;
mod text;

pub use registers::{circuit_to_abp, instruction_count, MAX_CIRCUIT_DEPTH, VERTEX_LIMIT};
pub use text::parse_abp;

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Polynomial, Rational};

/// Largest support an intermediate path sum may reach in [`abp_expand`].
pub const ABP_EXPAND_LIMIT: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbpError {
    #[error("circuit depth {0} exceeds {MAX_CIRCUIT_DEPTH}; run depth_reduce first")]
    TooDeep(usize),
    #[error("circuit contains divisions")]
    HasDivisions,
    #[error("circuit must have exactly one output, it has {0}")]
    OutputCount(usize),
    #[error("{0} exceeds the limit of {1}")]
    TooLarge(&'static str, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbpEdge {
    pub from: usize,
    pub to: usize,
    pub label: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbpViolation {
    LabelDegree { from: usize, to: usize, degree: u64 },
    NotConsecutive { from: usize, to: usize },
    /// The first layer must hold exactly the source.
    Source(Vec<usize>),
    /// The last layer must hold exactly the sink.
    Sink(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    params: Vec<String>,
    layer: Vec<usize>,
    edges: Vec<AbpEdge>,
    source: usize,
    sink: usize,
}

impl Abp {
    /// Source in layer 0, sink in layer `length`, no edges.
    pub fn new(params: Vec<String>, length: usize) -> Self {
        Abp { params, layer: vec![0, length], edges: Vec::new(), source: 0, sink: 1 }
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn num_vars(&self) -> usize {
        self.params.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn num_vertices(&self) -> usize {
        self.layer.len()
    }

    pub fn layer_of(&self, u: usize) -> usize {
        self.layer[u]
    }

    pub fn edges(&self) -> &[AbpEdge] {
        &self.edges
    }

    /// Number of layers, source and sink layers included.
    pub fn num_layers(&self) -> usize {
        self.layer.iter().max().map_or(0, |m| m + 1)
    }

    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_layers()];
        for (u, &l) in self.layer.iter().enumerate() {
            out[l].push(u);
        }
        out
    }

    pub fn width(&self) -> usize {
        self.layers().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_vertex(&mut self, layer: usize) -> usize {
        self.layer.push(layer);
        self.layer.len() - 1
    }

    /// Parallel edges are allowed here and merged by [`prune`](Self::prune).
    pub fn add_edge(&mut self, from: usize, to: usize, label: Polynomial) {
        self.edges.push(AbpEdge { from, to, label });
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for (k, e) in self.edges.iter().enumerate() {
            out[e.from].push(k);
        }
        out
    }

    /// Vertices in ascending layer order.
    fn layer_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.num_vertices()).collect();
        order.sort_by_key(|&u| self.layer[u]);
        order
    }

    /// Merges parallel edges, drops zero labels and every vertex that is not
    /// on a source-to-sink path; the source and sink always stay.
    pub fn prune(&self) -> Abp {
        let n = self.num_vertices();
        let mut merged: Vec<AbpEdge> = Vec::with_capacity(self.edges.len());
        let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.edges {
            match slot.get(&(e.from, e.to)) {
                Some(&k) => merged[k].label = &merged[k].label + &e.label,
                None => {
                    slot.insert((e.from, e.to), merged.len());
                    merged.push(e.clone());
                }
            }
        }
        let live: Vec<&AbpEdge> = merged.iter().filter(|e| !e.label.is_zero()).collect();
        let mut fwd = vec![false; n];
        let mut bwd = vec![false; n];
        fwd[self.source] = true;
        bwd[self.sink] = true;
        let order = self.layer_order();
        let mut by_from: Vec<Vec<&AbpEdge>> = vec![Vec::new(); n];
        let mut by_to: Vec<Vec<&AbpEdge>> = vec![Vec::new(); n];
        for e in &live {
            by_from[e.from].push(e);
            by_to[e.to].push(e);
        }
        for &u in &order {
            if fwd[u] {
                for e in &by_from[u] {
                    fwd[e.to] = true;
                }
            }
        }
        for &u in order.iter().rev() {
            if bwd[u] {
                for e in &by_to[u] {
                    bwd[e.from] = true;
                }
            }
        }
        let keep = |u: usize| u == self.source || u == self.sink || (fwd[u] && bwd[u]);
        let mut id = vec![usize::MAX; n];
        let mut layer = Vec::new();
        for &u in &order {
            if keep(u) {
                id[u] = layer.len();
                layer.push(self.layer[u]);
            }
        }
        let edges = live
            .into_iter()
            .filter(|e| fwd[e.from] && bwd[e.to] && keep(e.from) && keep(e.to))
            .map(|e| AbpEdge { from: id[e.from], to: id[e.to], label: e.label.clone() })
            .collect();
        Abp { params: self.params.clone(), layer, edges, source: id[self.source], sink: id[self.sink] }
    }
}

/// Path sum at a point, by forward dynamic programming over the layers.
pub fn abp_eval(a: &Abp, v: &[Rational]) -> Result<Rational, AbpError> {
    let out = a.out_edges();
    let mut val = vec![Rational::zero(); a.num_vertices()];
    val[a.source] = Rational::one();
    for u in a.layer_order() {
        if val[u].is_zero() {
            continue;
        }
        for &k in &out[u] {
            let e = &a.edges[k];
            let x = e.label.eval(v)? * &val[u];
            val[e.to] += x;
        }
    }
    Ok(val[a.sink].clone())
}

/// Path sum as a polynomial.
pub fn abp_expand(a: &Abp) -> Result<Polynomial, AbpError> {
    let out = a.out_edges();
    let mut val = vec![Polynomial::zero(); a.num_vertices()];
    val[a.source] = Polynomial::one();
    for u in a.layer_order() {
        if val[u].is_zero() {
            continue;
        }
        let here = std::mem::take(&mut val[u]);
        for &k in &out[u] {
            let e = &a.edges[k];
            let x = e.label.checked_mul(&here)?;
            val[e.to] = &val[e.to] + &x;
            if val[e.to].support_size() > ABP_EXPAND_LIMIT {
                return Err(AbpError::TooLarge("path-sum support", ABP_EXPAND_LIMIT));
            }
        }
        val[u] = here;
    }
    Ok(std::mem::take(&mut val[a.sink]))
}

pub fn validate_abp(a: &Abp) -> Vec<AbpViolation> {
    let mut out = Vec::new();
    for e in &a.edges {
        let degree = e.label.degree();
        if degree > 1 {
            out.push(AbpViolation::LabelDegree { from: e.from, to: e.to, degree });
        }
        if a.layer[e.to] != a.layer[e.from] + 1 {
            out.push(AbpViolation::NotConsecutive { from: e.from, to: e.to });
        }
    }
    let layers = a.layers();
    if layers.first().map(|l| l.as_slice()) != Some(&[a.source][..]) {
        out.push(AbpViolation::Source(layers.first().cloned().unwrap_or_default()));
    }
    if layers.last().map(|l| l.as_slice()) != Some(&[a.sink][..]) {
        out.push(AbpViolation::Sink(layers.last().cloned().unwrap_or_default()));
    }
    out
}

/// A prefix-sharing program for a sparse polynomial.
///
/// Each monomial is spelled as its variables in ascending order, padded with
/// the label 1 up to the total degree `L` (at least 1); monomials sharing a
/// prefix share the vertices for it. The last edge of a monomial carries its
/// coefficient, and edges into the sink that share a tail vertex are summed,
/// so labels stay linear. The width is at most the number of monomials.
pub fn abp_from_polynomial(p: &Polynomial, params: Vec<String>) -> Abp {
    let len = (p.degree() as usize).max(1);
    let mut a = Abp::new(params, len);
    let mut child: HashMap<(usize, Option<usize>), usize> = HashMap::new();
    for (m, c) in p.terms() {
        let mut word: Vec<Option<usize>> = Vec::with_capacity(len);
        for &(k, e) in m.pairs() {
            word.extend(std::iter::repeat(Some(k as usize)).take(e as usize));
        }
        word.resize(len, None);
        let mut at = a.source;
        for (depth, sym) in word[..len - 1].iter().enumerate() {
            at = match child.get(&(at, *sym)) {
                Some(&v) => v,
                None => {
                    let v = a.add_vertex(depth + 1);
                    a.add_edge(at, v, symbol_label(*sym));
                    child.insert((at, *sym), v);
                    v
                }
            };
        }
        let sink = a.sink;
        a.add_edge(at, sink, symbol_label(word[len - 1]).scale(c));
    }
    a.prune()
}

fn symbol_label(sym: Option<usize>) -> Polynomial {
    match sym {
        Some(k) => Polynomial::var(k),
        None => Polynomial::one(),
    }
}
