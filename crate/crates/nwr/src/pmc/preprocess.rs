//! Contraction of extremal-value states on the parameter-erased graph.

use super::{Pmc, StateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualitativeReport {
    /// States with no path to the target (0-based, original ids).
    pub prob0: Vec<StateId>,
    /// States that reach the target almost surely under every graph-preserving valuation.
    pub prob1: Vec<StateId>,
    /// Old id to new id.
    pub mapping: Vec<StateId>,
}

/// Reverse adjacency in CSR form.
pub(crate) fn reverse_csr(pmc: &Pmc) -> (Vec<usize>, Vec<StateId>) {
    let n = pmc.n();
    let mut deg = vec![0usize; n + 1];
    for s in 0..n {
        for e in pmc.row(s) {
            deg[e.to + 1] += 1;
        }
    }
    for i in 0..n {
        deg[i + 1] += deg[i];
    }
    let mut fill = deg.clone();
    let mut adj = vec![0; deg[n]];
    for s in 0..n {
        for e in pmc.row(s) {
            adj[fill[e.to]] = s;
            fill[e.to] += 1;
        }
    }
    (deg, adj)
}

fn backward_closure(n: usize, off: &[usize], adj: &[StateId], seeds: &[StateId]) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack: Vec<StateId> = Vec::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &u in &adj[off[v]..off[v + 1]] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// Merges prob0 states into the sink and prob1 states into the target, then
/// renumbers so that target = n and sink = n-1 (1-based).
pub fn qualitative_preprocess(pmc: &Pmc) -> (Pmc, QualitativeReport) {
    let n = pmc.n();
    let (off, adj) = reverse_csr(pmc);
    let reach_target = backward_closure(n, &off, &adj, &[pmc.target()]);
    let prob0: Vec<StateId> = (0..n).filter(|&s| !reach_target[s]).collect();
    let reach_prob0 = backward_closure(n, &off, &adj, &prob0);
    let prob1: Vec<StateId> = (0..n).filter(|&s| !reach_prob0[s]).collect();
    debug_assert!(prob1.iter().all(|&s| reach_target[s]), "prob0 and prob1 overlap");

    let kept: Vec<StateId> = (0..n).filter(|&s| reach_target[s] && reach_prob0[s]).collect();
    let new_sink = kept.len();
    let new_target = kept.len() + 1;
    let mut mapping = vec![0; n];
    for s in 0..n {
        mapping[s] = if !reach_target[s] {
            new_sink
        } else if !reach_prob0[s] {
            new_target
        } else {
            0
        };
    }
    for (i, &s) in kept.iter().enumerate() {
        mapping[s] = i;
    }

    let mut out = Pmc::new(pmc.params().to_vec(), kept.len() + 2, new_target, new_sink);
    for (i, &s) in kept.iter().enumerate() {
        for e in pmc.row(s) {
            out.add_transition(i, mapping[e.to], pmc.poly(e.poly).clone());
        }
    }
    if !pmc.labels().is_empty() {
        let mut labels: Vec<String> = kept.iter().map(|&s| pmc.labels()[s].clone()).collect();
        labels.push(pmc.labels()[pmc.sink()].clone());
        labels.push(pmc.labels()[pmc.target()].clone());
        out.set_labels(labels);
    }
    out.set_initial(pmc.initial().map(|s| mapping[s]));
    (out, QualitativeReport { prob0, prob1, mapping })
}
