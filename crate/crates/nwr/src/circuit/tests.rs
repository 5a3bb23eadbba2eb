use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::strategies::{point, small_rational};
use crate::algebra::{int, parse_poly, rat};

fn names(m: usize) -> Vec<String> {
    ["x", "y", "z", "w"][..m].iter().map(|s| s.to_string()).collect()
}

fn poly(text: &str, m: usize) -> Polynomial {
    parse_poly(text, &names(m)).unwrap()
}

/// Builds a circuit from a list of `(kind, a, b)` steps; operands index the
/// gates built so far. Kinds: 0 add, 1 mul, 2 sub, 3 div by `b + 1`.
fn circuit_from_steps(m: usize, consts: &[Rational], steps: &[(u8, usize, usize)]) -> Circuit {
    let mut c = Circuit::new(m);
    let mut pool: Vec<GateId> = (0..m).map(|k| c.input(k)).collect();
    for r in consts {
        pool.push(c.constant(r.clone()));
    }
    for &(kind, a, b) in steps {
        let (a, b) = (pool[a % pool.len()], pool[b % pool.len()]);
        let g = match kind % 4 {
            0 => c.add(a, b),
            1 => c.mul(a, b),
            2 => c.sub(a, b),
            _ => {
                let one = c.one();
                let d = c.add(b, one);
                c.div(a, d)
            }
        };
        pool.push(g);
    }
    let out = *pool.last().unwrap();
    c.set_outputs(vec![out]);
    c
}

fn arb_circuit(m: usize, max_steps: usize, divisions: bool) -> impl Strategy<Value = Circuit> {
    let kinds = if divisions { 0u8..4 } else { 0u8..3 };
    (
        prop::collection::vec(small_rational(), 1..3),
        prop::collection::vec((kinds, any::<usize>(), any::<usize>()), 1..max_steps),
    )
        .prop_map(move |(consts, steps)| circuit_from_steps(m, &consts, &steps))
}

#[test]
fn evaluates_with_divisions() {
    // (x + 1)(x - 1) / x at x = 2
    let mut c = Circuit::new(1);
    let x = c.input(0);
    let one = c.one();
    let a = c.add(x, one);
    let b = c.sub(x, one);
    let p = c.mul(a, b);
    let q = c.div(p, x);
    c.set_outputs(vec![q]);
    assert_eq!(c.eval(&[int(2)]).unwrap(), vec![rat(3, 2)]);
    assert!(matches!(c.eval(&[int(0)]), Err(CircuitError::DivisionByZero(_))));
}

#[test]
fn gates_are_shared() {
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let a = c.add(x, y);
    let b = c.add(y, x);
    assert_eq!(a, b);
    assert_eq!(c.mul(x, y), c.mul(y, x));
    assert_eq!(c.size(), 4);
    // folding
    let zero = c.zero();
    assert_eq!(c.add(x, zero), x);
    assert_eq!(c.mul(x, zero), zero);
    let two = c.constant(int(2));
    let three = c.constant(int(3));
    let six = c.mul(two, three);
    assert_eq!(c.gate(six), &Gate::Const(int(6)));
}

#[test]
fn polynomial_circuit_expands_back() {
    let p = poly("3*x^5*y - 2*y^2 + 1/2", 2);
    let c = from_polynomials(&[p.clone()], 2);
    assert_eq!(c.expand_to_polynomial().unwrap(), vec![p]);
    assert_eq!(c.syntactic_degree().unwrap(), vec![6]);
}

#[test]
fn syntactic_degree_counts_products() {
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let xx = c.mul(x, x);
    let xxy = c.mul(xx, y);
    // x*x - x*x still has formal degree 2
    let cancel = c.sub(xx, xx);
    c.set_outputs(vec![xxy, cancel]);
    assert_eq!(c.syntactic_degree().unwrap(), vec![3, 2]);
    let d = c.div(x, y);
    c.set_outputs(vec![d]);
    assert_eq!(c.syntactic_degree().unwrap_err(), CircuitError::HasDivisions);
}

#[test]
fn text_round_trip() {
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let h = c.constant(rat(-1, 2));
    let a = c.mul(x, h);
    let b = c.div(a, y);
    c.set_outputs(vec![b, a]);
    let text = c.to_text(&names(2));
    assert!(text.starts_with("inputs x y\n"));
    assert!(text.contains(" const -1/2\n"));
    let (back, ns) = parse_circuit(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(ns, names(2));
}

#[test]
fn text_errors_name_the_line() {
    let bad = "inputs x\n0 input 0\n1 mul 0 5\noutputs 1\n";
    assert_eq!(parse_circuit(bad).unwrap_err(), CircuitError::Parse { line: 3, msg: "gate 5 is not defined yet".into() });
    assert!(parse_circuit("0 input 0\n").is_err());
    assert!(parse_circuit("inputs x\n0 input 3\noutputs 0\n").is_err());
    assert!(parse_circuit("inputs x\n0 input 0\n").is_err());
}

#[test]
fn unit_constants_keep_values() {
    let p = poly("37/6*x - 5", 1);
    let c = from_polynomials(&[p.clone()], 1);
    let u = c.unit_constants();
    for g in u.gates() {
        if let Gate::Const(r) = g {
            assert!(r.is_zero() || r.is_one() || *r == -Rational::one());
        }
    }
    for x in [int(3), rat(2, 7)] {
        assert_eq!(u.eval(&[x.clone()]).unwrap(), vec![p.eval(&[x]).unwrap()]);
    }
}

#[test]
fn pushed_divisions_sit_at_the_outputs() {
    // 1/x + 1/y
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let one = c.one();
    let a = c.div(one, x);
    let b = c.div(one, y);
    let s = c.add(a, b);
    c.set_outputs(vec![s]);
    let p = c.push_divisions();
    let divs: Vec<GateId> = (0..p.size()).filter(|&g| matches!(p.gate(g), Gate::Div(..))).collect();
    assert_eq!(divs, p.outputs().to_vec());
    assert_eq!(p.eval(&[int(2), int(3)]).unwrap(), vec![rat(5, 6)]);
}

#[test]
fn eliminates_an_exact_quotient() {
    // (x^2 - y^2) / (x - y) = x + y
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let xx = c.mul(x, x);
    let yy = c.mul(y, y);
    let n = c.sub(xx, yy);
    let d = c.sub(x, y);
    let q = c.div(n, d);
    c.set_outputs(vec![q]);
    let e = c.eliminate_divisions(1, 7).unwrap();
    assert!(!e.has_divisions());
    assert_eq!(e.expand_to_polynomial().unwrap(), vec![poly("x + y", 2)]);
    // a degree bound that is too small is caught
    assert_eq!(c.eliminate_divisions(0, 7).unwrap_err(), CircuitError::Mismatch);
}

#[test]
fn eliminates_a_division_by_a_constant_free_denominator() {
    // x^3 / x = x^2: every point near 0 is avoided by the shift
    let mut c = Circuit::new(1);
    let x = c.input(0);
    let x3 = c.pow(x, 3);
    let q = c.div(x3, x);
    c.set_outputs(vec![q]);
    let e = c.eliminate_divisions(2, 1).unwrap();
    assert_eq!(e.expand_to_polynomial().unwrap(), vec![poly("x^2", 1)]);
}

#[test]
fn derivatives_of_a_polynomial() {
    let f = poly("x^2*y + 3*x", 2);
    let c = from_polynomials(&[f.clone()], 2);
    let d = c.derivatives().unwrap();
    let got = d.expand_to_polynomial().unwrap();
    assert_eq!(got, vec![f.clone(), poly("2*x*y + 3", 2), poly("x^2", 2)]);
}

#[test]
fn derivatives_through_a_division() {
    // f = x / y
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let q = c.div(x, y);
    c.set_outputs(vec![q]);
    let d = c.derivatives().unwrap();
    let v = d.eval(&[int(3), int(2)]).unwrap();
    assert_eq!(v, vec![rat(3, 2), rat(1, 2), rat(-3, 4)]);
    assert!(d.size() <= 5 * c.size() + 2 * 2 + 4);
}

#[test]
fn derivatives_need_one_output() {
    let c = from_polynomials(&[poly("x", 1), poly("1", 1)], 1);
    assert_eq!(c.derivatives().unwrap_err(), CircuitError::OutputCount(2, 1));
}

#[test]
fn depth_reduce_flattens_a_horner_chain() {
    // h = (((x + 1) x + 1) x + 1) ... degree 32, depth 63
    let mut c = Circuit::new(1);
    let x = c.input(0);
    let one = c.one();
    let mut h = c.add(x, one);
    for _ in 1..32 {
        let t = c.mul(h, x);
        h = c.add(t, one);
    }
    c.set_outputs(vec![h]);
    let before = c.depth();
    assert_eq!(before, 63);
    let r = c.depth_reduce().unwrap();
    assert!(r.depth() < before, "{} >= {before}", r.depth());
    assert!((r.depth() as f64) <= depth_bound(c.size(), 32));
    assert_eq!(r.expand_to_polynomial().unwrap(), c.expand_to_polynomial().unwrap());
}

#[test]
fn depth_reduce_of_a_product_chain() {
    // (x+y)(x+2y)...(x+16y) multiplied left to right
    let mut c = Circuit::new(2);
    let (x, y) = (c.input(0), c.input(1));
    let mut acc = c.one();
    for k in 1..=16 {
        let ky = c.scale(&int(k), y);
        let f = c.add(x, ky);
        acc = c.mul(acc, f);
    }
    c.set_outputs(vec![acc]);
    let r = c.depth_reduce().unwrap();
    assert!(r.depth() < c.depth());
    assert_eq!(r.expand_to_polynomial().unwrap(), c.expand_to_polynomial().unwrap());
}

#[test]
fn depth_reduce_keeps_shallow_circuits() {
    let c = from_polynomials(&[poly("x*y + 1", 2)], 2);
    assert_eq!(c.depth_reduce().unwrap(), c);
}

#[test]
fn random_points_are_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        for r in random_point(&mut rng, 3) {
            assert!(r.numer().abs() < (1 << 15).into() || r.is_zero());
            assert!(*r.denom() < (1 << 16).into());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_agrees_with_evaluation(c in arb_circuit(2, 12, false), v in point(2)) {
        let p = c.expand_to_polynomial().unwrap();
        prop_assert_eq!(c.eval(&v).unwrap(), vec![p[0].eval(&v).unwrap()]);
        prop_assert!(p[0].degree() <= c.syntactic_degree().unwrap()[0]);
    }

    #[test]
    fn derivatives_match_symbolic_ones(c in arb_circuit(2, 12, false)) {
        let p = c.expand_to_polynomial().unwrap().remove(0);
        let d = c.derivatives().unwrap();
        prop_assert!(d.size() <= 5 * c.size() + 8);
        let got = d.expand_to_polynomial().unwrap();
        prop_assert_eq!(&got[0], &p);
        for k in 0..2 {
            prop_assert_eq!(&got[k + 1], &p.partial_derivative(k));
        }
    }

    #[test]
    fn derivatives_with_divisions_agree_numerically(c in arb_circuit(2, 10, true), v in point(2)) {
        let d = c.derivatives().unwrap();
        // central check against the pushed form: f, and the quotient rule via
        // the division-free numerator and denominator
        if let (Ok(f), Ok(dv)) = (c.eval(&v), d.eval(&v)) {
            prop_assert_eq!(&dv[0], &f[0]);
            let pairs = c.fraction_pairs();
            let polys = pairs.expand_to_polynomial().unwrap();
            let (n, den) = (&polys[0], &polys[1]);
            let dd = den.eval(&v).unwrap();
            prop_assume!(!dd.is_zero());
            for k in 0..2 {
                let num = &n.partial_derivative(k) * den - n * &den.partial_derivative(k);
                prop_assert_eq!(&dv[k + 1], &(num.eval(&v).unwrap() / (&dd * &dd)));
            }
        }
    }

    #[test]
    fn pushing_divisions_preserves_values(c in arb_circuit(2, 12, true), v in point(2)) {
        let p = c.push_divisions();
        prop_assert!(p.size() <= 4 * c.size() + 4);
        let divs = (0..p.size()).filter(|&g| matches!(p.gate(g), Gate::Div(..))).count();
        prop_assert!(divs <= 1);
        if let Ok(want) = c.eval(&v) {
            if let Ok(got) = p.eval(&v) {
                prop_assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn depth_reduce_preserves_polynomials(c in arb_circuit(2, 14, false)) {
        let r = c.depth_reduce().unwrap();
        prop_assert!(!r.has_divisions());
        prop_assert_eq!(r.expand_to_polynomial().unwrap(), c.expand_to_polynomial().unwrap());
        prop_assert!(r.depth() <= c.depth());
        let d = c.syntactic_degree().unwrap()[0];
        prop_assert!((r.depth() as f64) <= depth_bound(c.size(), d).max(c.depth() as f64));
    }

    #[test]
    fn text_round_trips(c in arb_circuit(3, 12, true)) {
        let (back, _) = parse_circuit(&c.to_text(&names(3))).unwrap();
        prop_assert_eq!(back, c);
    }
}
