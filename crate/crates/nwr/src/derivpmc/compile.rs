//! Layered programs to simple pMCs.
//!
//! Every non-sink vertex `u` gets two states, `ū` and `u̲`, with
//! `g(ū) + g(u̲) = 1`. Writing `⟦u⟧` for the path sum from `u` to the sink,
//! the invariant is `⟦u⟧ = N_j (β_u + g(ū))` for `u` in layer `j`, where the
//! sink has `β = 0`, `ū = ⊤` and `u̲ = ⊥`.
//!
//! Going down one layer, `f_u = Σ ℓ(u,v) (β_v + G_v)` is a polynomial in the
//! parameters and one fresh variable `G_v` per vertex of the next layer. The
//! literal-product rewrite turns it into `n_u (c/d + Σ a/b Q)`, and each
//! product `Q` becomes a chain of states: one per parameter literal, ending
//! in `v̄` or `v̲` for the `G` literal, or in `⊤` if there is none.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{chonev_rewrite, DerivError, Literal};
use crate::abp::{validate_abp, Abp};
use crate::algebra::{Polynomial, Rational};
use crate::pmc::{Pmc, StateId};

const TOP: usize = usize::MAX;
const BOT: usize = usize::MAX - 1;

/// A simple pMC `M` and constants with `⟦A⟧ = β + N · g(probe)`.
#[derive(Clone, Debug)]
pub struct AbpPmc {
    pub pmc: Pmc,
    pub beta: Rational,
    pub n: BigInt,
    pub probe: StateId,
    /// `(ū, u̲)` for every vertex that is not the sink, by program vertex.
    pub pairs: Vec<(usize, StateId, StateId)>,
}

struct Builder {
    labels: Vec<String>,
    edges: Vec<(usize, usize, Polynomial)>,
}

impl Builder {
    fn state(&mut self, label: String) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, p: Polynomial) {
        self.edges.push((from, to, p));
    }

    /// State reached with weight `Π lits` and then continuing to `end`; with
    /// `positive` unset it computes `1 - Π lits · g(end)` instead, so a
    /// failed literal goes to `⊤`.
    fn chain(&mut self, lits: &[Literal], end: usize, positive: bool) -> usize {
        let fail = if positive { BOT } else { TOP };
        let mut next = end;
        for l in lits.iter().rev() {
            let c = self.state(format!("c{}", self.labels.len()));
            let p = l.to_polynomial();
            let q = &Polynomial::one() - &p;
            self.edge(c, next, p);
            self.edge(c, fail, q);
            next = c;
        }
        next
    }
}

/// Compiles a program with labels of degree at most one.
pub fn abp_to_pmc(a: &Abp) -> Result<AbpPmc, DerivError> {
    let bad = validate_abp(a);
    if !bad.is_empty() {
        return Err(DerivError::InvalidAbp(bad));
    }
    let a = a.prune();
    let m = a.num_vars();
    let layers = a.layers();
    let nv = a.num_vertices();
    let mut out: Vec<Vec<(usize, &Polynomial)>> = vec![Vec::new(); nv];
    for e in a.edges() {
        out[e.from].push((e.to, &e.label));
    }

    let mut b = Builder { labels: Vec::new(), edges: Vec::new() };
    let mut bar = vec![TOP; nv];
    let mut under = vec![BOT; nv];
    for layer in &layers {
        for &u in layer {
            if u != a.sink() {
                bar[u] = b.state(format!("u{}+", u + 1));
                under[u] = b.state(format!("u{}-", u + 1));
            }
        }
    }
    let mut beta = vec![Rational::zero(); nv];
    let mut scale = BigInt::one();
    let g_var = |pos: usize| m + pos;

    for j in (0..layers.len().saturating_sub(1)).rev() {
        let next = &layers[j + 1];
        let pos_of = |v: usize| next.iter().position(|&w| w == v).expect("edges go one layer down");
        let forms: Vec<_> = layers[j]
            .iter()
            .map(|&u| {
                let mut f = Polynomial::zero();
                for &(v, l) in &out[u] {
                    let tail = &Polynomial::constant(beta[v].clone()) + &Polynomial::var(g_var(pos_of(v)));
                    f = &f + &(l * &tail);
                }
                chonev_rewrite(&f)
            })
            .collect();
        let top = forms.iter().map(|f| f.n.clone()).max().unwrap_or_else(BigInt::one);
        for (&u, form) in layers[j].iter().zip(&forms) {
            let shrink = Rational::new(form.n.clone(), top.clone());
            beta[u] = form.constant() * &shrink;
            let mut rest = Rational::one();
            for t in &form.terms {
                let w = t.weight() * &shrink;
                rest -= &w;
                let (xs, gs): (Vec<Literal>, Vec<Literal>) = t.q.iter().partition(|l| l.var < m);
                debug_assert!(gs.len() <= 1, "one G factor per product");
                let (up, down) = match gs.first() {
                    None => (TOP, BOT),
                    Some(g) => {
                        let v = next[g.var - m];
                        if g.complement {
                            (under[v], bar[v])
                        } else {
                            (bar[v], under[v])
                        }
                    }
                };
                let wp = Polynomial::constant(w);
                let s = b.chain(&xs, up, true);
                b.edge(bar[u], s, wp.clone());
                let s = b.chain(&xs, down, false);
                b.edge(under[u], s, wp);
            }
            debug_assert!(!rest.is_negative());
            let rp = Polynomial::constant(rest);
            b.edge(bar[u], BOT, rp.clone());
            b.edge(under[u], TOP, rp);
        }
        scale *= top;
    }

    let total = b.labels.len() + 2;
    let (sink, target) = (total - 2, total - 1);
    let fix = |s: usize| match s {
        TOP => target,
        BOT => sink,
        s => s,
    };
    let mut pmc = Pmc::new(a.params().to_vec(), total, target, sink);
    for (from, to, p) in b.edges {
        pmc.add_transition(from, fix(to), p);
    }
    let mut labels = b.labels;
    labels.push("0".into());
    labels.push("1".into());
    pmc.set_labels(labels);
    let source = a.source();
    // a program whose source is the sink cannot pass validation
    let probe = bar[source];
    pmc.set_initial(Some(probe));
    let pairs = (0..nv).filter(|&u| u != a.sink()).map(|u| (u, bar[u], under[u])).collect();
    Ok(AbpPmc { pmc, beta: Rational::from_integer(scale.clone()) * &beta[source], n: scale, probe, pairs })
}
