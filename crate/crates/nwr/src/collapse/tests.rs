use proptest::prelude::*;

use super::*;
use crate::algebra::Polynomial;
use crate::benchgen::{expected_sizes, generate, random_simple_pmc, random_trivial_pmc, RandomSpec, Variant, VariantSpec};
use crate::pmc::fixtures::{diamond, chain_model};
use crate::pmc::row_sum_substitution;

/// s -> t, t -> {target, sink}; state ids s=0, t=1, sink=2, target=3.
fn chain() -> Pmc {
    let mut m = Pmc::new(vec!["x".into(), "y".into()], 4, 3, 2);
    m.add_transition(0, 1, Polynomial::one());
    m.add_transition(1, 3, Polynomial::var(0));
    m.add_transition(1, 2, Polynomial::var(1));
    m
}

/// The classes by one backward search per candidate exit, as a reference.
fn classes_by_search(pmc: &Pmc) -> (Vec<EquivalenceClass>, usize) {
    let n = pmc.n();
    let rev = Reverse::new(pmc);
    let mut todo = vec![true; n];
    let mut classes = Vec::new();
    let mut trimmed = 0;
    for u in reverse_bfs_order(pmc) {
        if !todo[u] {
            continue;
        }
        todo[u] = false;
        if pmc.is_extremal(u) {
            classes.push(EquivalenceClass { exit: u, members: vec![u] });
            continue;
        }
        let mut mark = vec![false; n];
        let mut stack = vec![pmc.target(), pmc.sink()];
        for &r in &stack {
            mark[r] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in rev.preds(v) {
                if w != u && !mark[w] {
                    mark[w] = true;
                    stack.push(w);
                }
            }
        }
        let mut members = vec![u];
        for s in (0..n).filter(|&s| s != u && !mark[s]) {
            if todo[s] {
                todo[s] = false;
                members.push(s);
            } else {
                trimmed += 1;
            }
        }
        classes.push(EquivalenceClass { exit: u, members });
    }
    (classes, trimmed)
}

fn same_as_search(m: &Pmc) {
    let (classes, trimmed) = classes_with(m, &Reverse::new(m)).unwrap();
    assert_eq!((classes, trimmed), classes_by_search(m));
}

#[test]
fn dominators_agree_with_search_on_ladders() {
    for v in Variant::ALL {
        for n in [2, 3, 5] {
            same_as_search(&generate(VariantSpec { variant: v, n }).unwrap());
        }
    }
    same_as_search(&diamond());
    same_as_search(&chain_model());
    same_as_search(&chain());
}

#[test]
fn states_off_every_path_join_the_first_exit() {
    // 0 -> 1 -> target, 2 <-> 3 reach nothing
    let mut m = Pmc::new(vec![], 6, 5, 4);
    m.add_transition(0, 1, Polynomial::one());
    m.add_transition(1, 5, Polynomial::one());
    m.add_transition(2, 3, Polynomial::one());
    m.add_transition(3, 2, Polynomial::one());
    same_as_search(&m);
    let classes = equivalence_classes(&m).unwrap();
    assert!(classes.contains(&EquivalenceClass { exit: 1, members: vec![1, 0, 2, 3] }));
}

#[test]
fn chain_model_reverse_order() {
    // target, then u (one step), then s and v (two steps), then the sink
    assert_eq!(reverse_bfs_order(&chain_model()), vec![4, 1, 0, 2, 3]);
}

#[test]
fn extremal_only_model() {
    let m = Pmc::new(vec![], 2, 1, 0);
    assert_eq!(reverse_bfs_order(&m), vec![1, 0]);
    let (out, rep) = collapse(&m).unwrap();
    assert_eq!(out, m);
    assert_eq!(rep.classes.len(), 2);
}

#[test]
fn chain_start_joins_its_successor() {
    let classes = equivalence_classes(&chain()).unwrap();
    assert!(classes.contains(&EquivalenceClass { exit: 1, members: vec![1, 0] }));
    let (out, rep) = collapse(&chain()).unwrap();
    assert_eq!(out.n(), 3);
    assert_eq!(rep.mapping, vec![0, 0, 1, 2]);
    let oracle = oracle_equivalence_classes(&chain()).unwrap();
    assert!(oracle.contains(&vec![0, 1]));
}

#[test]
fn fixtures_have_only_singletons() {
    for m in [diamond(), chain_model()] {
        let classes = equivalence_classes(&m).unwrap();
        assert_eq!(classes.len(), m.n());
        let (out, _) = collapse(&m).unwrap();
        assert_eq!(out, m);
        assert_eq!(oracle_equivalence_classes(&m).unwrap().len(), m.n());
    }
}

#[test]
fn ladder_blocks_become_single_states() {
    for v in Variant::ALL {
        for n in [2, 3, 4] {
            let spec = VariantSpec { variant: v, n };
            let m = generate(spec).unwrap();
            let (out, rep) = collapse(&m).unwrap();
            assert_eq!((m.n(), out.n()), expected_sizes(spec), "{v} {n}");
            assert_eq!(rep.trimmed, 0);
            let blocks = rep.classes.iter().filter(|c| c.members.len() > 1).count();
            assert_eq!(blocks, 2 * n);
            assert!(rep.classes.iter().all(|c| c.members.len() == 1 || c.members.len() == 2 * n - 1));
            let mentions_p = out.transitions().any(|(_, _, p)| p.uses_var(0));
            assert_eq!(mentions_p, matches!(v, Variant::C | Variant::D), "{v} {n}");
        }
    }
}

#[test]
fn collapse_is_idempotent() {
    let m = generate(VariantSpec { variant: Variant::C, n: 3 }).unwrap();
    let (once, _) = collapse(&m).unwrap();
    let (twice, rep) = collapse(&once).unwrap();
    assert_eq!(once, twice);
    assert_eq!(rep.size_before, rep.size_after);
}

#[test]
fn not_normal_form_is_an_error() {
    let m = Pmc::new(vec![], 3, 0, 1);
    assert_eq!(collapse(&m).unwrap_err(), CollapseError::NotNormalForm);
}

#[test]
fn oracle_guard() {
    let m = generate(VariantSpec { variant: Variant::A, n: 2 }).unwrap();
    assert_eq!(oracle_equivalence_classes(&m).unwrap_err(), CollapseError::OracleTooLarge(15));
}

#[test]
fn report_formats() {
    let m = generate(VariantSpec { variant: Variant::A, n: 2 }).unwrap();
    let (_, rep) = collapse(&m).unwrap();
    let json = rep.to_json("A-2");
    assert!(json.contains("\"size_before\": 15"));
    assert!(json.contains("\"size_after\": 7"));
    let (_, again) = collapse(&m).unwrap();
    assert_eq!(json, again.to_json("A-2"));
    let csv = CollapseReport::to_csv(&[("A-2", &rep)]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("benchmark,size_before,size_after,classes,elapsed_ms"));
    assert!(lines.next().unwrap().starts_with("A-2,15,7,7,"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dominators_agree_with_search(seed in any::<u64>()) {
        same_as_search(&random_trivial_pmc(seed, 12));
        same_as_search(&random_simple_pmc(seed, RandomSpec { max_states: 12, num_params: 2, max_degree: 2 }));
    }

    #[test]
    fn classes_refine_the_value_partition(seed in any::<u64>()) {
        let m = random_trivial_pmc(seed, 10);
        let oracle = oracle_equivalence_classes(&m).unwrap();
        let (out, rep) = collapse(&m).unwrap();
        prop_assert_eq!(rep.trimmed, 0);
        for c in &rep.classes {
            prop_assert!(oracle.iter().any(|g| c.members.iter().all(|s| g.contains(s))));
        }
        let subst = row_sum_substitution(&m);
        let before = value_functions(&m.substitute(&subst)).unwrap();
        let after = value_functions(&out.substitute(&subst)).unwrap();
        for c in &rep.classes {
            prop_assert!(ratfn_equal(&before[c.exit], &after[rep.mapping[c.exit]]));
        }
        prop_assert_eq!(rep.size_after, rep.size_before - rep.classes.iter().map(|c| c.members.len() - 1).sum::<usize>());
    }
}
