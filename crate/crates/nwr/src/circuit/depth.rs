//! Depth reduction for division-free circuits.
//!
//! The circuit is first split into homogeneous components. Degree-0 parts
//! are numbers and degree-1 parts linear forms, both kept symbolically; the
//! remaining nodes are sums (with rational weights, flattened so that sums
//! never feed sums) and products of two nodes of positive degree. The
//! heavier factor of a product is the one of larger degree.
//!
//! For nodes `u`, `v` let `D(u, v)` be the sum over paths from `u` to `v`
//! that follow sum edges and heavy edges, each path weighted by its sum
//! coefficients and the light factors it passes. With `G_m` the products
//! `t = t1 * t2` of degree above `m` whose heavy factor `t1` has degree at
//! most `m`:
//!
//! ```text
//! u       = sum_{t in G_m} D(u, t) * t1 * t2      deg u > m
//! D(u, v) = sum_{t in G_m} D(u, t) * D(t1, v) * t2 deg v <= m < deg u
//! ```
//!
//! Choosing `m` halfway (in powers of two) through the degree range makes
//! every factor on the right at most half as hard as the left side, which
//! gives depth `O(log(size * d) * log d)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{Circuit, CircuitError, GateId};
use crate::algebra::Rational;

/// Homogeneous nodes above this are refused.
pub const HOM_LIMIT: usize = 12_000;
/// Total sum-children entries above this are refused.
const ENTRY_LIMIT: usize = 2_000_000;

/// `8 log2(size * d) (log2 d + 1)`, the depth the rewrite is held to.
pub fn depth_bound(size: usize, d: u64) -> f64 {
    let d = d.max(1) as f64;
    8.0 * ((size.max(1) as f64) * d).log2() * (d.log2() + 1.0)
}

#[derive(Clone, Debug)]
enum Node {
    Leaf(Vec<Rational>),
    Sum(Vec<(usize, Rational)>),
    /// Heavy factor first.
    Mul(usize, usize),
}

#[derive(Clone, Debug)]
enum Part {
    Zero,
    Const(Rational),
    Node(usize),
}

struct Hom {
    m: usize,
    nodes: Vec<Node>,
    deg: Vec<u64>,
    leaves: HashMap<Vec<Rational>, usize>,
    muls: HashMap<(usize, usize), usize>,
    entries: usize,
}

impl Hom {
    fn node(&mut self, n: Node, deg: u64) -> Result<usize, CircuitError> {
        if self.nodes.len() >= HOM_LIMIT {
            return Err(CircuitError::TooLarge("homogeneous nodes", HOM_LIMIT));
        }
        if let Node::Sum(ch) = &n {
            self.entries += ch.len();
            if self.entries > ENTRY_LIMIT {
                return Err(CircuitError::TooLarge("sum entries", ENTRY_LIMIT));
            }
        }
        self.nodes.push(n);
        self.deg.push(deg);
        Ok(self.nodes.len() - 1)
    }

    fn leaf(&mut self, lin: Vec<Rational>) -> Result<Part, CircuitError> {
        if lin.iter().all(Zero::is_zero) {
            return Ok(Part::Zero);
        }
        if let Some(&id) = self.leaves.get(&lin) {
            return Ok(Part::Node(id));
        }
        let id = self.node(Node::Leaf(lin.clone()), 1)?;
        self.leaves.insert(lin, id);
        Ok(Part::Node(id))
    }

    fn linear(&self, p: &Part) -> Vec<Rational> {
        match p {
            Part::Node(id) => match &self.nodes[*id] {
                Node::Leaf(l) => l.clone(),
                _ => unreachable!("degree-1 parts are leaves"),
            },
            _ => vec![Rational::zero(); self.m],
        }
    }

    fn product(&mut self, a: usize, b: usize) -> Result<usize, CircuitError> {
        let key = if self.deg[a] >= self.deg[b] { (a, b) } else { (b, a) };
        if let Some(&id) = self.muls.get(&key) {
            return Ok(id);
        }
        let id = self.node(Node::Mul(key.0, key.1), self.deg[a] + self.deg[b])?;
        self.muls.insert(key, id);
        Ok(id)
    }

    /// Weighted sum of nodes of degree `deg >= 2`, flattening sum children.
    fn combine(&mut self, terms: Vec<(Rational, usize)>, deg: u64) -> Result<Part, CircuitError> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, id) in terms {
            match &self.nodes[id] {
                Node::Sum(ch) => {
                    for (k, w) in ch {
                        *acc.entry(*k).or_insert_with(Rational::zero) += &c * w;
                    }
                }
                _ => *acc.entry(id).or_insert_with(Rational::zero) += c,
            }
        }
        acc.retain(|_, c| !c.is_zero());
        if acc.is_empty() {
            return Ok(Part::Zero);
        }
        if acc.len() == 1 {
            let (&id, c) = acc.iter().next().unwrap();
            if c.is_one() {
                return Ok(Part::Node(id));
            }
        }
        Ok(Part::Node(self.node(Node::Sum(acc.into_iter().collect()), deg)?))
    }

    fn add(&mut self, a: &[Part], b: &[Part]) -> Result<Vec<Part>, CircuitError> {
        let len = a.len().max(b.len());
        let mut out = Vec::with_capacity(len);
        for e in 0..len {
            let x = a.get(e).cloned().unwrap_or(Part::Zero);
            let y = b.get(e).cloned().unwrap_or(Part::Zero);
            out.push(match e {
                0 => Part::Const(const_of(&x) + const_of(&y)),
                1 => {
                    let (lx, ly) = (self.linear(&x), self.linear(&y));
                    self.leaf(lx.iter().zip(&ly).map(|(p, q)| p + q).collect())?
                }
                _ => {
                    let terms = [x, y]
                        .into_iter()
                        .filter_map(|p| match p {
                            Part::Node(id) => Some((Rational::one(), id)),
                            _ => None,
                        })
                        .collect();
                    self.combine(terms, e as u64)?
                }
            });
        }
        Ok(out)
    }

    fn mul(&mut self, a: &[Part], b: &[Part], cap: usize) -> Result<Vec<Part>, CircuitError> {
        let len = (a.len() + b.len() - 1).min(cap + 1);
        let mut out = Vec::with_capacity(len);
        let (a0, b0) = (const_of(&a[0]), const_of(&b[0]));
        for e in 0..len {
            out.push(match e {
                0 => Part::Const(&a0 * &b0),
                1 => {
                    let la = a.get(1).map(|p| self.linear(p)).unwrap_or_else(|| vec![Rational::zero(); self.m]);
                    let lb = b.get(1).map(|p| self.linear(p)).unwrap_or_else(|| vec![Rational::zero(); self.m]);
                    self.leaf(la.iter().zip(&lb).map(|(x, y)| &b0 * x + &a0 * y).collect())?
                }
                _ => {
                    let mut terms = Vec::new();
                    for i in 0..=e {
                        let (Some(x), Some(y)) = (a.get(i), b.get(e - i)) else { continue };
                        match (x, y) {
                            (Part::Zero, _) | (_, Part::Zero) => {}
                            (Part::Const(c), Part::Node(n)) | (Part::Node(n), Part::Const(c)) => {
                                terms.push((c.clone(), *n))
                            }
                            (Part::Node(p), Part::Node(q)) => terms.push((Rational::one(), self.product(*p, *q)?)),
                            (Part::Const(_), Part::Const(_)) => unreachable!("constants only in degree 0"),
                        }
                    }
                    self.combine(terms, e as u64)?
                }
            });
        }
        Ok(out)
    }
}

fn const_of(p: &Part) -> Rational {
    match p {
        Part::Const(c) => c.clone(),
        _ => Rational::zero(),
    }
}

/// Largest power of two strictly below `g >= 2`.
fn half(g: u64) -> u64 {
    debug_assert!(g >= 2);
    1 << (63 - (g - 1).leading_zeros())
}

struct Emit<'a> {
    h: &'a Hom,
    words: usize,
    reach: Vec<Vec<u64>>,
    c: Circuit,
    val: HashMap<usize, GateId>,
    quot: HashMap<(usize, usize), Option<GateId>>,
    cq: HashMap<(usize, usize), Rational>,
    lq: HashMap<(usize, usize), Vec<Rational>>,
    gm: HashMap<u64, Vec<usize>>,
}

impl<'a> Emit<'a> {
    fn new(h: &'a Hom) -> Self {
        let n = h.nodes.len();
        let words = n.div_ceil(64);
        let mut reach: Vec<Vec<u64>> = Vec::with_capacity(n);
        for (u, node) in h.nodes.iter().enumerate() {
            let mut r = vec![0u64; words];
            r[u / 64] |= 1 << (u % 64);
            let children: Vec<usize> = match node {
                Node::Leaf(_) => vec![],
                Node::Sum(ch) => ch.iter().map(|(k, _)| *k).collect(),
                Node::Mul(heavy, _) => vec![*heavy],
            };
            for k in children {
                for (w, x) in r.iter_mut().zip(&reach[k]) {
                    *w |= x;
                }
            }
            reach.push(r);
        }
        let mut c = Circuit::new(h.m);
        for k in 0..h.m {
            c.input(k);
        }
        Emit {
            h,
            words,
            reach,
            c,
            val: HashMap::new(),
            quot: HashMap::new(),
            cq: HashMap::new(),
            lq: HashMap::new(),
            gm: HashMap::new(),
        }
    }

    fn reaches(&self, u: usize, v: usize) -> bool {
        debug_assert!(v / 64 < self.words);
        self.reach[u][v / 64] >> (v % 64) & 1 == 1
    }

    fn g_set(&mut self, m: u64) -> Vec<usize> {
        let h = self.h;
        self.gm
            .entry(m)
            .or_insert_with(|| {
                (0..h.nodes.len())
                    .filter(|&t| matches!(h.nodes[t], Node::Mul(t1, _) if h.deg[t] > m && h.deg[t1] <= m))
                    .collect()
            })
            .clone()
    }

    fn linear_gate(&mut self, lin: &[Rational]) -> GateId {
        let terms: Vec<GateId> = lin
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let x = self.c.input(k);
                self.c.scale(c, x)
            })
            .collect();
        self.c.sum(&terms)
    }

    fn value(&mut self, u: usize) -> GateId {
        let h = self.h;
        if let Some(&g) = self.val.get(&u) {
            return g;
        }
        let g = match &h.nodes[u] {
            Node::Leaf(lin) => self.linear_gate(lin),
            _ => {
                let m = half(h.deg[u]);
                let mut terms = Vec::new();
                for t in self.g_set(m) {
                    if !self.reaches(u, t) {
                        continue;
                    }
                    let Some(q) = self.quot(u, t) else { continue };
                    let Node::Mul(t1, t2) = h.nodes[t] else { unreachable!() };
                    let a = self.value(t1);
                    let b = self.value(t2);
                    terms.push(self.c.product(&[q, a, b]));
                }
                self.c.sum(&terms)
            }
        };
        self.val.insert(u, g);
        g
    }

    /// `D(u, v)` as a gate, `None` when it is identically zero by structure.
    fn quot(&mut self, u: usize, v: usize) -> Option<GateId> {
        let h = self.h;
        if !self.reaches(u, v) {
            return None;
        }
        if let Some(&g) = self.quot.get(&(u, v)) {
            return g;
        }
        let gap = h.deg[u] - h.deg[v];
        let g = match gap {
            0 => {
                let c = self.const_quot(u, v);
                (!c.is_zero()).then(|| self.c.constant(c))
            }
            1 => {
                let l = self.lin_quot(u, v);
                (!l.iter().all(Zero::is_zero)).then(|| self.linear_gate(&l))
            }
            _ => {
                let m = h.deg[v] + half(gap);
                let mut terms = Vec::new();
                for t in self.g_set(m) {
                    let Node::Mul(t1, t2) = h.nodes[t] else { unreachable!() };
                    if !self.reaches(u, t) || !self.reaches(t1, v) {
                        continue;
                    }
                    let (Some(a), Some(b)) = (self.quot(u, t), self.quot(t1, v)) else { continue };
                    let l = self.value(t2);
                    terms.push(self.c.product(&[a, b, l]));
                }
                (!terms.is_empty()).then(|| self.c.sum(&terms))
            }
        };
        self.quot.insert((u, v), g);
        g
    }

    /// `D(u, v)` for equal degrees: a number.
    fn const_quot(&mut self, u: usize, v: usize) -> Rational {
        let h = self.h;
        if u == v {
            return Rational::one();
        }
        if !self.reaches(u, v) {
            return Rational::zero();
        }
        if let Some(c) = self.cq.get(&(u, v)) {
            return c.clone();
        }
        let c = match &h.nodes[u] {
            Node::Sum(ch) => {
                let mut acc = Rational::zero();
                for (k, w) in ch {
                    acc += w * self.const_quot(*k, v);
                }
                acc
            }
            // a product's heavy factor has smaller degree than the product
            _ => Rational::zero(),
        };
        self.cq.insert((u, v), c.clone());
        c
    }

    /// `D(u, v)` for a degree gap of one: a linear form.
    fn lin_quot(&mut self, u: usize, v: usize) -> Vec<Rational> {
        let h = self.h;
        let m = h.m;
        if !self.reaches(u, v) {
            return vec![Rational::zero(); m];
        }
        if let Some(l) = self.lq.get(&(u, v)) {
            return l.clone();
        }
        let l = match &h.nodes[u] {
            Node::Leaf(_) => vec![Rational::zero(); m],
            Node::Sum(ch) => {
                let mut acc = vec![Rational::zero(); m];
                for (k, w) in ch {
                    let sub = self.lin_quot(*k, v);
                    for (a, s) in acc.iter_mut().zip(&sub) {
                        *a += w * s;
                    }
                }
                acc
            }
            Node::Mul(heavy, light) => {
                // the gap forces deg light = 1 and deg heavy = deg v
                if h.deg[*light] != 1 {
                    vec![Rational::zero(); m]
                } else {
                    let c = self.const_quot(*heavy, v);
                    let Node::Leaf(lin) = &h.nodes[*light] else { unreachable!() };
                    lin.iter().map(|x| &c * x).collect()
                }
            }
        };
        self.lq.insert((u, v), l.clone());
        l
    }
}

impl Circuit {
    /// An equivalent circuit of depth `O(log(size * d) * log d)`, or `self`
    /// when that is not shallower.
    pub fn depth_reduce(&self) -> Result<Circuit, CircuitError> {
        let degs = self.gate_degrees()?;
        let cap = self.outputs.iter().map(|&o| degs[o]).max().unwrap_or(0) as usize;
        let mut h = Hom {
            m: self.num_inputs,
            nodes: Vec::new(),
            deg: Vec::new(),
            leaves: HashMap::new(),
            muls: HashMap::new(),
            entries: 0,
        };
        let live = self.cone(&self.outputs);
        let mut parts: Vec<Vec<Part>> = vec![Vec::new(); self.size()];
        for (g, gate) in self.gates.iter().enumerate() {
            if !live[g] {
                continue;
            }
            parts[g] = match gate {
                super::Gate::Input(k) => {
                    let mut lin = vec![Rational::zero(); self.num_inputs];
                    lin[*k] = Rational::one();
                    let leaf = h.leaf(lin)?;
                    if cap == 0 {
                        vec![Part::Const(Rational::zero())]
                    } else {
                        vec![Part::Const(Rational::zero()), leaf]
                    }
                }
                super::Gate::Const(c) => vec![Part::Const(c.clone())],
                super::Gate::Add(a, b) => h.add(&parts[*a], &parts[*b])?,
                super::Gate::Mul(a, b) => h.mul(&parts[*a], &parts[*b], cap)?,
                super::Gate::Div(..) => return Err(CircuitError::HasDivisions),
            };
        }
        let mut emit = Emit::new(&h);
        let mut outs = Vec::with_capacity(self.outputs.len());
        for &o in &self.outputs {
            let mut comps = Vec::new();
            for p in &parts[o] {
                comps.push(match p {
                    Part::Zero => continue,
                    Part::Const(c) => emit.c.constant(c.clone()),
                    Part::Node(id) => emit.value(*id),
                });
            }
            outs.push(emit.c.sum(&comps));
        }
        let mut c = emit.c;
        c.set_outputs(outs);
        let c = c.prune();
        Ok(if c.depth() < self.depth() { c } else { self.clone() })
    }
}
