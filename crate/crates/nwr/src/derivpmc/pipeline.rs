//! Partial derivatives of value functions as simple pMCs.
//!
//! For `g_i = num / den` the derivative is `P / D` with
//! `P = ∂num · den - num · ∂den` and `D = den^2 > 0` on the graph-preserving
//! region. `P` is compiled to a layered program and then to a simple pMC
//! `M'` with `P = β + N · g'(probe)`, so the sign of the derivative is the
//! sign of `β/N + g'(probe)`.
//!
//! Two programs are candidates: the prefix program of `P` and the register
//! program of a depth-reduced division-free circuit for `P`. The smaller one
//! is compiled. The circuit route is tried only while it stays small; every
//! stage that runs is cross-checked against `P / D` at random points.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{abp_to_pmc, DerivError};
use crate::abp::{abp_from_polynomial, circuit_to_abp, instruction_count, Abp, MAX_CIRCUIT_DEPTH};
use crate::algebra::{Polynomial, Rational};
use crate::circuit::{random_point, Circuit};
use crate::pmc::{Pmc, StateId};
use crate::valuefn::{
    acyclic_value_polynomials, degree_bound, evaluate_values, value_function_circuits, value_functions,
};

/// Programs up to this many vertices are verified symbolically.
pub const SYMBOLIC_CHECK_VERTICES: usize = 40;
/// Points used otherwise.
pub const SAMPLED_CHECK_POINTS: usize = 100;
/// Division elimination is skipped when `gates * (d + 1)^2` exceeds this.
const DIVISION_FREE_BUDGET: usize = 5000;
/// Depth reduction is skipped for division-free numerators above this size.
const REDUCE_GATES: usize = 400;
/// Register programs are only built below this many instructions.
const REGISTER_INSTRUCTIONS: usize = 20_000;
const CHECK_POINTS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Symbolic,
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    Prefix,
    Registers,
}

/// One line per pipeline stage: name and what came out of it.
#[derive(Clone, Debug)]
pub struct Stage {
    pub name: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct DerivativePmc {
    pub pmc: Pmc,
    pub beta: Rational,
    pub n: BigInt,
    pub probe: StateId,
    pub numerator: Polynomial,
    pub scale: Polynomial,
    pub route: Route,
    pub abp_vertices: usize,
    pub abp_width: usize,
    pub check: Check,
    pub stages: Vec<Stage>,
}

impl DerivativePmc {
    /// `β + N · g'(probe)` at `v`, which equals `P(v)`.
    pub fn relation_value(&self, v: &[Rational]) -> Result<Rational, DerivError> {
        let g = evaluate_values(&self.pmc, v)?;
        Ok(&self.beta + Rational::from_integer(self.n.clone()) * &g[self.probe])
    }

    /// The model document of `M'` with a `relation` object; ids are 1-based.
    pub fn to_json(&self) -> String {
        let mut doc: serde_json::Value = serde_json::from_str(&crate::pmc::emit_model(&self.pmc)).expect("model json");
        let names = self.pmc.params();
        doc["relation"] = json!({
            "beta": self.beta.to_string(),
            "N": self.n.to_string(),
            "probe_state": self.probe + 1,
            "numerator": self.numerator.render(names),
            "scale_poly": self.scale.render(names),
        });
        serde_json::to_string_pretty(&doc).expect("json") + "\n"
    }
}

/// `∂g_i / ∂x_k` of a model in normal form.
pub fn derivative_pmc(pmc: &Pmc, i: StateId, k: usize) -> Result<DerivativePmc, DerivError> {
    if i >= pmc.n() {
        return Err(DerivError::State(i, pmc.n()));
    }
    let m = pmc.params().len();
    if k >= m {
        return Err(DerivError::Param(k, m));
    }
    let mut stages = Vec::new();
    let g = value_functions(pmc)?;
    let (num, den) = (&g[i].num, &g[i].den);
    let p = &(&num.partial_derivative(k) * den) - &(num * &den.partial_derivative(k));
    let d = den * den;
    stages.push(Stage { name: "value function", detail: format!("P has {} terms, D has {}", p.support_size(), d.support_size()) });

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (i as u64) << 8 ^ k as u64);
    let points: Vec<Vec<Rational>> = std::iter::repeat_with(|| random_point(&mut rng, m))
        .filter(|v| d.eval(v).map_or(false, |x| !x.is_zero()))
        .take(CHECK_POINTS)
        .collect();
    let quotient = |v: &[Rational]| -> Result<Rational, DerivError> { Ok(p.eval(v)? / d.eval(v)?) };

    let vc = value_function_circuits(pmc)?;
    let value = vc.value(i).prune();
    stages.push(Stage { name: "circuit", detail: format!("{} gates", value.size()) });
    let grads = value.derivatives()?;
    let pushed = grads.with_outputs(&[grads.outputs()[k + 1]]).push_divisions();
    for v in &points {
        if grads.eval(v)?[k + 1] != quotient(v)? || pushed.eval(v)?[0] != quotient(v)? {
            return Err(DerivError::Mismatch("circuit derivative"));
        }
    }
    stages.push(Stage { name: "derivatives", detail: format!("{} gates after pushing divisions", pushed.size()) });

    let prefix = abp_from_polynomial(&p, pmc.params().to_vec());
    let mut abp = prefix;
    let mut route = Route::Prefix;
    match division_free_numerator(&vc.pair(i).prune(), k, degree_bound(pmc), &points, &p, &mut stages)? {
        Some(c) => {
            let len = instruction_count(&c);
            if c.depth() > MAX_CIRCUIT_DEPTH || len > REGISTER_INSTRUCTIONS {
                stages.push(Stage { name: "registers", detail: format!("skipped: depth {}, {len} instructions", c.depth()) });
            } else {
                let regs = circuit_to_abp(&c, pmc.params().to_vec())?;
                stages.push(Stage { name: "registers", detail: format!("{} vertices, width {}", regs.num_vertices(), regs.width()) });
                if regs.num_vertices() < abp.num_vertices() {
                    abp = regs;
                    route = Route::Registers;
                }
            }
        }
        None => stages.push(Stage { name: "registers", detail: "skipped".into() }),
    }
    stages.push(Stage { name: "program", detail: format!("{:?}, {} vertices, width {}", route, abp.num_vertices(), abp.width()) });

    let compiled = abp_to_pmc(&abp)?;
    let check = verify(&compiled.pmc, &compiled.beta, &compiled.n, compiled.probe, &p, &abp)?;
    stages.push(Stage { name: "pmc", detail: format!("{} states, {:?}", compiled.pmc.n(), check) });
    Ok(DerivativePmc {
        pmc: compiled.pmc,
        beta: compiled.beta,
        n: compiled.n,
        probe: compiled.probe,
        numerator: p,
        scale: d,
        route,
        abp_vertices: abp.num_vertices(),
        abp_width: abp.width(),
        check,
        stages,
    })
}

/// `∂num · den - num · ∂den` as a shallow division-free circuit, when the
/// value circuit is small enough to eliminate divisions from.
fn division_free_numerator(
    pair: &Circuit,
    k: usize,
    d: u64,
    points: &[Vec<Rational>],
    p: &Polynomial,
    stages: &mut Vec<Stage>,
) -> Result<Option<Circuit>, DerivError> {
    let graded = pair.size().saturating_mul((d as usize + 1).pow(2));
    if graded > DIVISION_FREE_BUDGET {
        stages.push(Stage { name: "eliminate divisions", detail: format!("skipped: {} gates at degree {d}", pair.size()) });
        return Ok(None);
    }
    let free = match pair.eliminate_divisions(d, 7) {
        Ok(c) => c,
        Err(e) => {
            stages.push(Stage { name: "eliminate divisions", detail: format!("skipped: {e}") });
            return Ok(None);
        }
    };
    let [fnum, fden] = [free.outputs()[0], free.outputs()[1]];
    let dn = free.with_outputs(&[fnum]).derivatives()?;
    let dd = free.with_outputs(&[fden]).derivatives()?;
    let mut c = Circuit::new(free.num_inputs());
    let xs: Vec<_> = (0..free.num_inputs()).map(|j| c.input(j)).collect();
    let o = c.import(&free, &xs, &[fnum, fden]);
    let a = c.import(&dn, &xs, &[dn.outputs()[k + 1]])[0];
    let b = c.import(&dd, &xs, &[dd.outputs()[k + 1]])[0];
    let left = c.mul(a, o[1]);
    let right = c.mul(o[0], b);
    let top = c.sub(left, right);
    c.set_outputs(vec![top]);
    let c = c.prune();
    stages.push(Stage { name: "eliminate divisions", detail: format!("{} gates, depth {}", c.size(), c.depth()) });
    if c.size() > REDUCE_GATES {
        stages.push(Stage { name: "depth reduce", detail: "skipped".into() });
        return Ok(None);
    }
    let reduced = match c.depth_reduce() {
        Ok(r) => r,
        Err(e) => {
            stages.push(Stage { name: "depth reduce", detail: format!("kept input: {e}") });
            c
        }
    };
    for v in points {
        if reduced.eval(v)?[0] != p.eval(v)? {
            return Err(DerivError::Mismatch("division-free numerator"));
        }
    }
    stages.push(Stage { name: "depth reduce", detail: format!("{} gates, depth {}", reduced.size(), reduced.depth()) });
    Ok(Some(reduced))
}

fn verify(pmc: &Pmc, beta: &Rational, n: &BigInt, probe: StateId, p: &Polynomial, abp: &Abp) -> Result<Check, DerivError> {
    let big_n = Rational::from_integer(n.clone());
    if abp.num_vertices() <= SYMBOLIC_CHECK_VERTICES {
        let g = acyclic_value_polynomials(pmc)?;
        let lhs = &Polynomial::constant(beta.clone()) + &g[probe].scale(&big_n);
        if &lhs != p {
            return Err(DerivError::Mismatch("relation"));
        }
        return Ok(Check::Symbolic);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xabc);
    for _ in 0..SAMPLED_CHECK_POINTS {
        let v = random_point(&mut rng, pmc.params().len());
        let g = evaluate_values(pmc, &v)?;
        if beta + &big_n * &g[probe] != p.eval(&v)? {
            return Err(DerivError::Mismatch("relation"));
        }
    }
    Ok(Check::Sampled(SAMPLED_CHECK_POINTS))
}
