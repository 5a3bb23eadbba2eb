use num_traits::{One, Zero};

use nwr::algebra::{parse_poly, rat, Rational};
use nwr::benchgen::{generate, random_simple_pmc, random_trivial_pmc, RandomSpec, Variant, VariantSpec};
use nwr::pmc::{emit_prism, parse_model, qualitative_preprocess, sample_valuation, Pmc, PmcKind};
use nwr::relations::{check_monotone, check_nwr, nwr_gadget, Method, Status, Witness};
use nwr::valuefn::{evaluate_values, value_functions};

const SPEC: RandomSpec = RandomSpec { max_states: 6, num_params: 2, max_degree: 2 };

fn fixture(name: &str) -> Pmc {
    let path = format!("{}/tests/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
    parse_model(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn inner(pmc: &Pmc) -> impl Iterator<Item = usize> + '_ {
    (0..pmc.n()).filter(|&s| !pmc.is_extremal(s))
}

#[test]
fn preprocessed_models_have_no_extremal_values() {
    for seed in 0..60 {
        for m in [random_simple_pmc(seed, SPEC), random_trivial_pmc(seed, 8)] {
            let kind = PmcKind::detect(&m);
            for k in 0..4 {
                let v = sample_valuation(&m, kind, seed * 4 + k).unwrap();
                let g = evaluate_values(&m, &v).unwrap();
                for s in inner(&m) {
                    assert!(g[s] > Rational::zero() && g[s] < Rational::one(), "seed {seed} state {s}");
                }
            }
        }
    }
}

#[test]
fn preprocessing_keeps_values() {
    // 1 -> {2: p, 3: 1-p}; 2 -> 5 surely (value 1); 3 -> 4 only (value 0);
    // 4 loops on itself and never leaves
    let text = r#"{ "parameters": ["p"], "states": 7, "target": 7, "sink": 6, "initial": 1,
      "transitions": [
        {"from": 1, "to": 2, "poly": "p"}, {"from": 1, "to": 3, "poly": "1-p"},
        {"from": 2, "to": 5, "poly": "1"}, {"from": 3, "to": 4, "poly": "1"},
        {"from": 4, "to": 4, "poly": "1"}, {"from": 5, "to": 7, "poly": "1"} ] }"#;
    let m = parse_model(text).unwrap();
    let (pre, rep) = qualitative_preprocess(&m);
    assert_eq!(rep.prob0, vec![2, 3, 5]);
    assert_eq!(rep.prob1, vec![1, 4, 6]);
    assert_eq!(pre.n(), 3);
    for k in 1..10 {
        let v = [rat(k, 10)];
        let (a, b) = (evaluate_values(&m, &v).unwrap(), evaluate_values(&pre, &v).unwrap());
        for s in 0..m.n() {
            assert_eq!(a[s], b[rep.mapping[s]], "state {s}");
        }
    }
}

/// One update `prob : (s'=k)`, probability as written.
fn parse_update(text: &str, n: usize) -> (String, usize) {
    let (prob, target) = text.rsplit_once(" : ").unwrap();
    let k: usize = target.strip_prefix("(s'=").and_then(|t| t.strip_suffix(')')).unwrap().parse().unwrap();
    assert!((1..=n).contains(&k));
    let prob = prob.strip_prefix('(').and_then(|p| p.strip_suffix(')')).unwrap_or(prob);
    (prob.to_string(), k)
}

#[test]
fn prism_output_is_well_formed() {
    let mut models = vec![fixture("diamond"), fixture("chain_model")];
    models.extend(Variant::ALL.map(|v| generate(VariantSpec { variant: v, n: 3 }).unwrap()));
    for m in models {
        let text = emit_prism(&m);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        assert_eq!(lines.next(), Some("dtmc"));
        for p in m.params() {
            assert_eq!(lines.next(), Some(format!("const double {p};").as_str()));
        }
        assert_eq!(lines.next(), Some("module chain"));
        let init = m.initial().unwrap_or(0) + 1;
        assert_eq!(lines.next().map(str::trim), Some(format!("s : [1..{}] init {init};", m.n()).as_str()));
        for s in 0..m.n() {
            let line = lines.next().unwrap().trim();
            let body = line.strip_prefix(&format!("[] s={} -> ", s + 1)).unwrap().strip_suffix(';').unwrap();
            // split on the update separator: every update ends with `(s'=k)`
            let parts: Vec<&str> = body.split(") + ").collect();
            assert_eq!(parts.len(), m.row(s).len(), "{line}");
            for (k, part) in parts.iter().enumerate() {
                let part = if k + 1 < parts.len() { format!("{part})") } else { part.to_string() };
                let (prob, to) = parse_update(&part, m.n());
                let edge = m.row(s).iter().find(|e| e.to + 1 == to).unwrap();
                assert_eq!(&parse_poly(&prob, m.params()).unwrap(), m.poly(edge.poly), "{line}");
            }
        }
        assert_eq!(lines.next(), Some("endmodule"));
        assert_eq!(lines.next(), Some(format!("label \"target\" = s={};", m.target() + 1).as_str()));
        assert_eq!(lines.next(), Some(format!("label \"sink\" = s={};", m.sink() + 1).as_str()));
        assert_eq!(lines.next(), None);
    }
}

#[test]
fn gadget_interpolates_on_a_grid() {
    let mut models = vec![fixture("chain_model")];
    models.extend((0..10).map(|seed| random_simple_pmc(seed, SPEC)));
    for m in models {
        let states: Vec<usize> = inner(&m).collect();
        for &i in &states {
            for &j in states.iter().filter(|&&j| j != i) {
                let (g, s, x) = nwr_gadget(&m, i, j).unwrap();
                assert!(g.is_normal_form() && PmcKind::detect(&g).simple);
                let shift = |t: usize| if t >= m.n() - 2 { t + 1 } else { t };
                for a in 1..4 {
                    for b in 1..4 {
                        let base = vec![rat(a, 4), rat(b, 4)];
                        let gm = evaluate_values(&m, &base[..m.num_params()]).unwrap();
                        for c in 0..=4 {
                            let mut v = base[..m.num_params()].to_vec();
                            v.push(rat(c, 4));
                            let gg = evaluate_values(&g, &v).unwrap();
                            assert_eq!(gg[s], &v[x] * &gm[j] + (Rational::one() - &v[x]) * &gm[i]);
                            assert_eq!(gg[shift(i)], gm[i]);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn never_worse_verdicts_are_consistent() {
    for seed in 0..20 {
        let m = random_simple_pmc(seed, SPEC);
        let g = value_functions(&m).unwrap();
        let kind = PmcKind::detect(&m);
        let points: Vec<Vec<Rational>> = (0..500).map(|k| sample_valuation(&m, kind, 1000 + k).unwrap()).collect();
        for i in inner(&m) {
            for j in inner(&m) {
                let v = check_nwr(&m, i, j, 100, seed).unwrap();
                match &v.status {
                    Status::CertifiedYes(_) => {
                        for p in &points {
                            assert!(g[i].eval(p).unwrap() <= g[j].eval(p).unwrap(), "seed {seed}: {i} <= {j}");
                        }
                    }
                    Status::RefutedNo(Witness::Point(p)) => {
                        let e = evaluate_values(&m, p).unwrap();
                        assert!(e[i] > e[j]);
                    }
                    other => assert!(matches!(other, Status::Unknown), "{other:?}"),
                }
            }
        }
    }
}

#[test]
fn certified_monotonicity_survives_dense_sampling() {
    let mut certified = 0;
    for seed in 0..20 {
        let m = random_simple_pmc(seed, SPEC);
        for i in inner(&m) {
            for k in 0..m.num_params() {
                let cert = check_monotone(&m, i, k, 0, 0, Method::Certificate).unwrap();
                if !cert.is_certified() {
                    continue;
                }
                certified += 1;
                let sampled = check_monotone(&m, i, k, 10_000, seed, Method::Sampling).unwrap();
                assert!(!sampled.is_refuted(), "seed {seed} state {i} param {k}");
            }
        }
    }
    assert!(certified > 0);
}

#[test]
fn derivative_method_agrees_with_sampling_on_refutations() {
    let names = vec!["p".to_string(), "r".to_string()];
    let m = fixture("diamond");
    let s = m.resolve_state("s").unwrap();
    // g_s = p^2 + r - r p increases in r and not in p
    let d = |k| check_monotone(&m, s, k, 2000, 3, Method::DerivativePmc).unwrap();
    assert!(d(1).is_certified());
    let Status::RefutedNo(Witness::Pair(lo, hi)) = d(0).status else { panic!("no witness in p") };
    let g = parse_poly("p^2 + r - r*p", &names).unwrap();
    assert!(g.eval(&lo).unwrap() > g.eval(&hi).unwrap());
    assert!(hi[0] > lo[0] && hi[1] == lo[1]);
}
