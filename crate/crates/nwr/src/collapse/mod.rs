//! Equivalence classes with a unique exit and their collapse.
//!
//! A state `u` absorbs every state that can reach neither the target nor the
//! sink once `u` is removed from the graph: all of their paths go through
//! `u`, so they have the value of `u` under every valuation.

mod report;

pub use report::{CollapseReport, EquivalenceClass};

use std::time::Instant;

use thiserror::Error;

use crate::algebra::ratfn_equal;
use crate::pmc::{row_sum_substitution, Pmc, StateId};
use crate::valuefn::{value_functions, ValueError};

/// Largest model the value-function oracle accepts.
pub const ORACLE_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("model is not in normal form; run the qualitative preprocessing first")]
    NotNormalForm,
    #[error("oracle is limited to {ORACLE_LIMIT} states, model has {0}")]
    OracleTooLarge(usize),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Predecessor lists in CSR form, self-loops dropped.
struct Reverse {
    off: Vec<usize>,
    adj: Vec<StateId>,
}

impl Reverse {
    fn new(pmc: &Pmc) -> Self {
        let n = pmc.n();
        let mut off = vec![0usize; n + 1];
        for s in 0..n {
            for e in pmc.row(s) {
                if e.to != s {
                    off[e.to + 1] += 1;
                }
            }
        }
        for i in 0..n {
            off[i + 1] += off[i];
        }
        let mut fill = off.clone();
        let mut adj = vec![0; off[n]];
        for s in 0..n {
            for e in pmc.row(s) {
                if e.to != s {
                    adj[fill[e.to]] = s;
                    fill[e.to] += 1;
                }
            }
        }
        Reverse { off, adj }
    }

    fn preds(&self, v: StateId) -> &[StateId] {
        &self.adj[self.off[v]..self.off[v + 1]]
    }
}

/// Backward BFS from the target; each frontier in ascending id order, then
/// the states that cannot reach the target, ascending.
pub fn reverse_bfs_order(pmc: &Pmc) -> Vec<StateId> {
    order_with(pmc, &Reverse::new(pmc))
}

fn order_with(pmc: &Pmc, rev: &Reverse) -> Vec<StateId> {
    let n = pmc.n();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut frontier = vec![pmc.target()];
    seen[pmc.target()] = true;
    while !frontier.is_empty() {
        order.extend_from_slice(&frontier);
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in rev.preds(v) {
                if !seen[u] {
                    seen[u] = true;
                    next.push(u);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
    }
    order.extend((0..n).filter(|&s| !seen[s]));
    order
}

/// Immediate dominators in the reversed graph rooted at a virtual node `n`
/// with edges to the target and the sink, by the iterative method of Cooper,
/// Harvey and Kennedy. `u` dominates `s` there exactly when every path from
/// `s` to the target or the sink passes through `u`. Returns the reverse
/// postorder and the dominator of each node; `usize::MAX` marks nodes the
/// root does not reach.
fn post_dominators(pmc: &Pmc, rev: &Reverse) -> (Vec<usize>, Vec<usize>) {
    let n = pmc.n();
    let root = n;
    let roots = [pmc.target(), pmc.sink()];
    let succ = |v: usize| -> &[StateId] {
        if v == root {
            &roots
        } else {
            rev.preds(v)
        }
    };
    let mut post = Vec::with_capacity(n + 1);
    let mut seen = vec![false; n + 1];
    let mut stack = vec![(root, 0usize)];
    seen[root] = true;
    while let Some((v, k)) = stack.last_mut() {
        let v = *v;
        if let Some(&w) = succ(v).get(*k) {
            *k += 1;
            if !seen[w] {
                seen[w] = true;
                stack.push((w, 0));
            }
        } else {
            post.push(v);
            stack.pop();
        }
    }
    let mut num = vec![usize::MAX; n + 1];
    for (k, &v) in post.iter().enumerate() {
        num[v] = k;
    }
    let mut idom = vec![usize::MAX; n + 1];
    idom[root] = root;
    let intersect = |idom: &[usize], mut a: usize, mut b: usize| {
        while a != b {
            while num[a] < num[b] {
                a = idom[a];
            }
            while num[b] < num[a] {
                b = idom[b];
            }
        }
        a
    };
    let rpo: Vec<usize> = post.iter().rev().copied().collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &v in &rpo[1..] {
            // predecessors in the reversed graph are successors in the model
            let extra = if roots.contains(&v) { Some(root) } else { None };
            let mut best = usize::MAX;
            for w in pmc.row(v).iter().map(|e| e.to).filter(|&w| w != v).chain(extra) {
                if idom[w] == usize::MAX {
                    continue;
                }
                best = if best == usize::MAX { w } else { intersect(&idom, w, best) };
            }
            if best != idom[v] {
                idom[v] = best;
                changed = true;
            }
        }
    }
    (rpo, idom)
}

/// Classes in discovery order; each lists its exit first, then the other
/// members ascending. The second value counts states that `{u} ∪ (S \ U)`
/// contained but that had already been assigned to an earlier class.
///
/// Processing `u` in reverse BFS order claims every unclaimed state that `u`
/// post-dominates, so each state ends up with its earliest non-extremal
/// post-dominator (itself included). That is read off the dominator tree in
/// one pass instead of one graph search per exit. States that reach neither
/// extremal state are in `S \ U` for every `u` and go to the first exit.
fn classes_with(pmc: &Pmc, rev: &Reverse) -> Result<(Vec<EquivalenceClass>, usize), CollapseError> {
    if !pmc.is_normal_form() {
        return Err(CollapseError::NotNormalForm);
    }
    let n = pmc.n();
    let order = order_with(pmc, rev);
    let mut pos = vec![0; n];
    for (k, &s) in order.iter().enumerate() {
        pos[s] = k;
    }
    let (rpo, idom) = post_dominators(pmc, rev);
    let mut exit_of = vec![usize::MAX; n];
    for &v in &rpo[1..] {
        let up = idom[v];
        exit_of[v] = if up == n || pmc.is_extremal(v) || pmc.is_extremal(up) || pos[v] < pos[exit_of[up]] {
            v
        } else {
            exit_of[up]
        };
    }
    let first = order.iter().copied().find(|&s| !pmc.is_extremal(s));
    let mut stray = 0;
    for s in 0..n {
        if exit_of[s] == usize::MAX {
            exit_of[s] = first.expect("unreached states are not extremal");
            stray += 1;
        }
    }

    let mut subtree = vec![1usize; n + 1];
    for &v in rpo[1..].iter().rev() {
        subtree[idom[v]] += subtree[v];
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for &u in &order {
        if exit_of[u] == u {
            class_of[u] = classes.len();
            classes.push(EquivalenceClass { exit: u, members: vec![u] });
        }
    }
    for s in 0..n {
        if exit_of[s] != s {
            classes[class_of[exit_of[s]]].members.push(s);
        }
    }
    let mut trimmed = 0;
    for c in &classes {
        if !pmc.is_extremal(c.exit) {
            let unmarked = subtree[c.exit] - 1 + stray - usize::from(exit_of[c.exit] == c.exit && idom[c.exit] == usize::MAX);
            trimmed += unmarked - (c.members.len() - 1);
        }
    }
    Ok((classes, trimmed))
}

pub fn equivalence_classes(pmc: &Pmc) -> Result<Vec<EquivalenceClass>, CollapseError> {
    Ok(classes_with(pmc, &Reverse::new(pmc))?.0)
}

/// Replaces every class by its exit.
///
/// Exits keep their relative order and labels, so the target and sink stay
/// last. Edges into a member are redirected to its exit, and edges from an
/// exit back into its own class become a self-loop; parallel edges are summed.
pub fn collapse(pmc: &Pmc) -> Result<(Pmc, CollapseReport), CollapseError> {
    let start = Instant::now();
    let rev = Reverse::new(pmc);
    let (classes, trimmed) = classes_with(pmc, &rev)?;
    let n = pmc.n();
    let mut exit_of = vec![0; n];
    for c in &classes {
        for &s in &c.members {
            exit_of[s] = c.exit;
        }
    }
    let mut exits: Vec<StateId> = classes.iter().map(|c| c.exit).collect();
    exits.sort_unstable();
    let mut new_id = vec![usize::MAX; n];
    for (k, &e) in exits.iter().enumerate() {
        new_id[e] = k;
    }
    let mapping: Vec<StateId> = (0..n).map(|s| new_id[exit_of[s]]).collect();

    let mut out = Pmc::new(pmc.params().to_vec(), exits.len(), mapping[pmc.target()], mapping[pmc.sink()]);
    for &e in &exits {
        if pmc.is_extremal(e) {
            continue;
        }
        for edge in pmc.row(e) {
            out.add_transition(mapping[e], mapping[edge.to], pmc.poly(edge.poly).clone());
        }
    }
    if !pmc.labels().is_empty() {
        out.set_labels(exits.iter().map(|&e| pmc.labels()[e].clone()).collect());
    }
    out.set_initial(pmc.initial().map(|s| mapping[s]));
    debug_assert!(classes.iter().all(|c| c.members.iter().all(|&s| s == c.exit
        || pmc.row(s).iter().all(|e| exit_of[e.to] == c.exit))));

    let report = CollapseReport {
        size_before: n,
        size_after: exits.len(),
        classes,
        mapping,
        trimmed,
        elapsed: start.elapsed(),
    };
    Ok((out, report))
}

/// Groups states by symbolic equality of their value functions, after the
/// row-sum constraints of parametric rows are substituted away.
pub fn oracle_equivalence_classes(pmc: &Pmc) -> Result<Vec<Vec<StateId>>, CollapseError> {
    if pmc.n() > ORACLE_LIMIT {
        return Err(CollapseError::OracleTooLarge(pmc.n()));
    }
    let g = value_functions(&pmc.substitute(&row_sum_substitution(pmc)))?;
    let mut groups: Vec<Vec<StateId>> = Vec::new();
    for s in 0..pmc.n() {
        match groups.iter_mut().find(|grp| ratfn_equal(&g[grp[0]], &g[s])) {
            Some(grp) => grp.push(s),
            None => groups.push(vec![s]),
        }
    }
    Ok(groups)
}

#[cfg(test)]
mod tests;
