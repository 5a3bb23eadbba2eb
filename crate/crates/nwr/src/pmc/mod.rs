//! The parametric Markov chain model.
//!
//! States are 0-based internally; every file format and CLI surface is 1-based.
//! Transition polynomials are interned, so a million-state benchmark with five
//! distinct labels stores five polynomials.

mod io;
mod preprocess;
mod sample;

pub use io::{emit_model, emit_prism, parse_model, ModelError};
pub use preprocess::{qualitative_preprocess, QualitativeReport};
pub use sample::{sample_valuation, SampleError};
pub(crate) use sample::sample_with;

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{Polynomial, Rational};
use crate::derivpmc::chonev_nonneg_certificate;

pub type StateId = usize;
pub type PolyId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub to: StateId,
    pub poly: PolyId,
}

#[derive(Clone, Debug)]
pub struct Pmc {
    params: Vec<String>,
    target: StateId,
    sink: StateId,
    initial: Option<StateId>,
    labels: Vec<String>,
    rows: Vec<Vec<Edge>>,
    polys: Vec<Polynomial>,
    intern: HashMap<Polynomial, PolyId>,
}

/// Declared class of a model; drives sampling and method applicability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PmcKind {
    pub simple: bool,
    pub trivially_parametric: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadExtremal(String),
    NoSuccessor(StateId),
    RowSum(StateId),
    NotTrivial(StateId, StateId),
    ReusedVariable(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadExtremal(m) => write!(f, "{m}"),
            Violation::NoSuccessor(s) => write!(f, "state {} has no outgoing transition", s + 1),
            Violation::RowSum(s) => write!(f, "row sum of state {} is not the constant 1", s + 1),
            Violation::NotTrivial(a, b) => {
                write!(f, "transition {} -> {} is not a lone parameter", a + 1, b + 1)
            }
            Violation::ReusedVariable(k) => write!(f, "parameter x{k} labels more than one transition"),
        }
    }
}

impl Pmc {
    /// An empty model with `n` states; target and sink get their self-loops.
    pub fn new(params: Vec<String>, n: usize, target: StateId, sink: StateId) -> Self {
        assert!(target < n && sink < n && target != sink, "target and sink must be distinct states");
        let mut m = Pmc {
            params,
            target,
            sink,
            initial: None,
            labels: Vec::new(),
            rows: vec![Vec::new(); n],
            polys: Vec::new(),
            intern: HashMap::new(),
        };
        m.add_transition(target, target, Polynomial::one());
        m.add_transition(sink, sink, Polynomial::one());
        m
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn target(&self) -> StateId {
        self.target
    }

    pub fn sink(&self) -> StateId {
        self.sink
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn set_initial(&mut self, s: Option<StateId>) {
        self.initial = s;
    }

    pub fn is_extremal(&self, s: StateId) -> bool {
        s == self.target || s == self.sink
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: StateId) -> Option<&str> {
        self.labels.get(s).map(|l| l.as_str()).filter(|l| !l.is_empty())
    }

    /// Sets labels; must be empty or one per state.
    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert!(labels.is_empty() || labels.len() == self.n());
        self.labels = labels;
    }

    /// Name for reports: the label if present, else the 1-based id.
    pub fn state_name(&self, s: StateId) -> String {
        self.label(s).map(str::to_string).unwrap_or_else(|| (s + 1).to_string())
    }

    /// Resolves a 1-based id or a label.
    pub fn resolve_state(&self, spec: &str) -> Option<StateId> {
        if let Some(i) = self.labels.iter().position(|l| l == spec) {
            return Some(i);
        }
        let k: usize = spec.parse().ok()?;
        (k >= 1 && k <= self.n()).then(|| k - 1)
    }

    /// Resolves a parameter name, a 1-based index or `x<index>`.
    pub fn resolve_param(&self, spec: &str) -> Option<usize> {
        if let Some(k) = self.params.iter().position(|p| p == spec) {
            return Some(k);
        }
        let k: usize = spec.strip_prefix('x').unwrap_or(spec).parse().ok()?;
        (k >= 1 && k <= self.num_params()).then(|| k - 1)
    }

    pub fn intern(&mut self, p: Polynomial) -> PolyId {
        if let Some(&id) = self.intern.get(&p) {
            return id;
        }
        let id = self.polys.len() as PolyId;
        self.polys.push(p.clone());
        self.intern.insert(p, id);
        id
    }

    pub fn poly(&self, id: PolyId) -> &Polynomial {
        &self.polys[id as usize]
    }

    pub fn row(&self, s: StateId) -> &[Edge] {
        &self.rows[s]
    }

    pub fn transition(&self, i: StateId, j: StateId) -> Option<&Polynomial> {
        self.rows[i].iter().find(|e| e.to == j).map(|e| self.poly(e.poly))
    }

    pub fn num_transitions(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Adds `p` to the transition `i -> j`, summing with an existing edge.
    pub fn add_transition(&mut self, i: StateId, j: StateId, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        if let Some(pos) = self.rows[i].iter().position(|e| e.to == j) {
            let sum = self.poly(self.rows[i][pos].poly) + &p;
            if sum.is_zero() {
                self.rows[i].remove(pos);
            } else {
                let id = self.intern(sum);
                self.rows[i][pos].poly = id;
            }
            return;
        }
        let id = self.intern(p);
        let row = &mut self.rows[i];
        let at = row.partition_point(|e| e.to < j);
        row.insert(at, Edge { to: j, poly: id });
    }

    /// Replaces the whole row of `i`.
    pub fn set_row(&mut self, i: StateId, edges: Vec<(StateId, Polynomial)>) {
        self.rows[i].clear();
        for (j, p) in edges {
            self.add_transition(i, j, p);
        }
    }

    /// Appends a fresh state with no transitions.
    pub fn add_state(&mut self, label: Option<String>) -> StateId {
        self.rows.push(Vec::new());
        if !self.labels.is_empty() || label.is_some() {
            self.labels.resize(self.rows.len() - 1, String::new());
            self.labels.push(label.unwrap_or_default());
        }
        self.rows.len() - 1
    }

    pub fn add_param(&mut self, name: String) -> usize {
        self.params.push(name);
        self.params.len() - 1
    }

    /// Every transition `(from, to, polynomial)`.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, StateId, &Polynomial)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(move |(i, r)| r.iter().map(move |e| (i, e.to, self.poly(e.poly))))
    }

    /// Maximum total degree over all labels.
    pub fn max_degree(&self) -> u64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|e| self.poly(e.poly).degree())
            .max()
            .unwrap_or(0)
    }

    pub fn row_sum(&self, s: StateId) -> Polynomial {
        let mut acc = Polynomial::zero();
        for e in &self.rows[s] {
            acc = &acc + self.poly(e.poly);
        }
        acc
    }

    /// Whether the model is in the normal form target = n, sink = n-1 (1-based).
    pub fn is_normal_form(&self) -> bool {
        let n = self.n();
        n >= 2 && self.target == n - 1 && self.sink == n - 2
    }
}

impl PartialEq for Pmc {
    /// Structural equality on states, parameters and transition polynomials
    /// (interning order is irrelevant).
    fn eq(&self, other: &Self) -> bool {
        if self.params != other.params
            || self.target != other.target
            || self.sink != other.sink
            || self.initial != other.initial
            || self.n() != other.n()
        {
            return false;
        }
        let la = if self.labels.iter().all(|l| l.is_empty()) { &[][..] } else { &self.labels[..] };
        let lb = if other.labels.iter().all(|l| l.is_empty()) { &[][..] } else { &other.labels[..] };
        if la != lb {
            return false;
        }
        (0..self.n()).all(|s| {
            let (ra, rb) = (&self.rows[s], &other.rows[s]);
            ra.len() == rb.len()
                && ra.iter().zip(rb).all(|(a, b)| a.to == b.to && self.poly(a.poly) == other.poly(b.poly))
        })
    }
}

impl PmcKind {
    /// Infers the kind from the transition labels.
    ///
    /// `simple` holds when every row sums to 1 and every label is certified
    /// positive on the open unit box; then the whole box is graph-preserving.
    pub fn detect(pmc: &Pmc) -> PmcKind {
        let simple = (0..pmc.n()).all(|s| pmc.row_sum(s).is_one())
            && pmc.polys_in_use().all(|p| positive_on_open_box(p));
        PmcKind { simple, trivially_parametric: trivial_violations(pmc).is_empty() }
    }
}

impl Pmc {
    fn polys_in_use(&self) -> impl Iterator<Item = &Polynomial> + '_ {
        self.rows.iter().flat_map(|r| r.iter()).map(|e| self.poly(e.poly))
    }
}

fn positive_on_open_box(p: &Polynomial) -> bool {
    if let Some(c) = p.as_constant() {
        return c.is_positive();
    }
    // Q_i products of literals are strictly positive inside the box, so a
    // certified form with at least one term is too
    chonev_nonneg_certificate(p)
}

fn trivial_violations(pmc: &Pmc) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for s in 0..pmc.n() {
        if pmc.is_extremal(s) {
            continue;
        }
        for e in pmc.row(s) {
            let p = pmc.poly(e.poly);
            let single = p.support_size() == 1 && {
                let (m, c) = p.leading_term().unwrap();
                c.is_one() && m.degree() == 1
            };
            // a lone successor is forced to probability 1; allow the constant
            let forced = pmc.row(s).len() == 1 && p.is_one();
            if forced {
                continue;
            }
            if !single {
                out.push(Violation::NotTrivial(s, e.to));
                continue;
            }
            let var = p.leading_term().unwrap().0.pairs()[0].0 as usize;
            *seen.entry(var).or_default() += 1;
        }
    }
    let mut reused: Vec<usize> = seen.into_iter().filter(|&(_, c)| c > 1).map(|(k, _)| k).collect();
    reused.sort_unstable();
    out.extend(reused.into_iter().map(Violation::ReusedVariable));
    out
}

/// For trivially parametric models: each row with several parametric edges
/// has its last parameter rewritten as one minus the others. Applying this to
/// the labels turns the row-sum constraint into an identity, so value
/// functions can be compared as plain rational functions.
pub fn row_sum_substitution(pmc: &Pmc) -> Vec<(usize, Polynomial)> {
    let mut out = Vec::new();
    for s in 0..pmc.n() {
        if pmc.is_extremal(s) || pmc.row(s).len() < 2 {
            continue;
        }
        let vars: Option<Vec<usize>> = pmc
            .row(s)
            .iter()
            .map(|e| {
                let p = pmc.poly(e.poly);
                let (m, c) = p.leading_term()?;
                (p.support_size() == 1 && c.is_one() && m.degree() == 1).then(|| m.pairs()[0].0 as usize)
            })
            .collect();
        if let Some(vars) = vars {
            let (last, rest) = vars.split_last().expect("two edges");
            let mut g = Polynomial::one();
            for &k in rest {
                g = &g - &Polynomial::var(k);
            }
            out.push((*last, g));
        }
    }
    out
}

impl Pmc {
    /// A copy with every label mapped through `f`; edges mapped to zero vanish.
    pub fn map_labels(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Pmc {
        let mut out = Pmc::new(self.params.clone(), self.n(), self.target, self.sink);
        for s in 0..self.n() {
            if self.is_extremal(s) {
                continue;
            }
            for e in &self.rows[s] {
                out.add_transition(s, e.to, f(self.poly(e.poly)));
            }
        }
        out.labels = self.labels.clone();
        out.initial = self.initial;
        out
    }

    pub fn substitute(&self, subst: &[(usize, Polynomial)]) -> Pmc {
        self.map_labels(|p| subst.iter().fold(p.clone(), |acc, (k, g)| acc.substitute(*k, g)))
    }
}

/// Structural well-formedness plus the checks implied by `kind`.
pub fn validate(pmc: &Pmc, kind: PmcKind) -> Vec<Violation> {
    let mut out = Vec::new();
    for (s, what) in [(pmc.target, "target"), (pmc.sink, "sink")] {
        let row = pmc.row(s);
        if row.len() != 1 || row[0].to != s || !pmc.poly(row[0].poly).is_one() {
            out.push(Violation::BadExtremal(format!("{what} must carry exactly a self-loop with probability 1")));
        }
    }
    for s in 0..pmc.n() {
        if pmc.row(s).is_empty() {
            out.push(Violation::NoSuccessor(s));
        }
    }
    if kind.simple {
        for s in 0..pmc.n() {
            if !pmc.row_sum(s).is_one() {
                out.push(Violation::RowSum(s));
            }
        }
    }
    if kind.trivially_parametric {
        out.extend(trivial_violations(pmc));
    }
    out
}

/// Exact check of `0 < p_ij(v) <= 1` on present edges and unit row sums.
pub fn is_graph_preserving(pmc: &Pmc, v: &[Rational]) -> bool {
    let mut cache: HashMap<PolyId, Rational> = HashMap::new();
    for s in 0..pmc.n() {
        let mut sum = Rational::zero();
        for e in pmc.row(s) {
            let val = match cache.get(&e.poly) {
                Some(x) => x.clone(),
                None => match pmc.poly(e.poly).eval(v) {
                    Ok(x) => {
                        cache.insert(e.poly, x.clone());
                        x
                    }
                    Err(_) => return false,
                },
            };
            if !val.is_positive() || val > Rational::one() {
                return false;
            }
            sum += val;
        }
        if !sum.is_one() {
            return false;
        }
    }
    true
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::algebra::parse_poly;

    fn build(params: &[&str], names: &[&str], edges: &[(&str, &str, &str)]) -> Pmc {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let idx = |n: &str| names.iter().position(|x| *x == n).unwrap();
        let mut m = Pmc::new(params.clone(), names.len(), idx("1"), idx("0"));
        for (a, b, p) in edges {
            m.add_transition(idx(a), idx(b), parse_poly(p, &params).unwrap());
        }
        m.set_labels(names.iter().map(|s| s.to_string()).collect());
        m.set_initial(Some(0));
        m
    }

    /// Two layers crossing into target 1 and fail 0: s,t then u,v.
    pub fn diamond() -> Pmc {
        build(
            &["p", "r"],
            &["s", "t", "u", "v", "0", "1"],
            &[
                ("s", "u", "p"),
                ("s", "v", "1-p"),
                ("t", "u", "r"),
                ("t", "v", "1-r"),
                ("u", "1", "p"),
                ("u", "0", "1-p"),
                ("v", "1", "r"),
                ("v", "0", "1-r"),
            ],
        )
    }

    /// s branches to u and v, v falls through to u.
    pub fn chain_model() -> Pmc {
        build(
            &["p", "r"],
            &["s", "u", "v", "0", "1"],
            &[
                ("s", "u", "r"),
                ("s", "v", "1-r"),
                ("u", "1", "1-p"),
                ("u", "0", "p"),
                ("v", "u", "p"),
                ("v", "0", "1-p"),
            ],
        )
    }
}
