//! Seeded random models for property tests and the acceptance corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, Polynomial};
use crate::derivpmc::Literal;
use crate::pmc::{qualitative_preprocess, Pmc, PmcKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    /// Upper bound on the state count, target and sink included.
    pub max_states: usize,
    pub num_params: usize,
    /// Largest total degree of a transition label (1 or 2).
    pub max_degree: usize,
}

fn random_literal<R: Rng>(rng: &mut R, m: usize) -> Polynomial {
    let l = Literal { var: rng.gen_range(0..m), complement: rng.gen_bool(0.5) };
    l.to_polynomial()
}

/// A factor in `(0, 1)` on the open box: a constant or a product of literals.
fn random_factor<R: Rng>(rng: &mut R, m: usize, deg: usize) -> Polynomial {
    if m == 0 || rng.gen_bool(0.2) {
        return Polynomial::constant(rat(rng.gen_range(1..4), 4));
    }
    let mut f = random_literal(rng, m);
    for _ in 1..rng.gen_range(1..=deg.max(1)) {
        f = &f * &random_literal(rng, m);
    }
    f
}

fn successors<R: Rng>(rng: &mut R, s: usize, n: usize, k: usize) -> Vec<usize> {
    // mostly forward edges so that chains and funnels appear, some back edges
    let mut pool: Vec<(u32, usize)> = Vec::with_capacity(n);
    for t in 0..n {
        if t == s && !rng.gen_bool(0.3) {
            continue;
        }
        let rank = if t > s { 0 } else { rng.gen_range(1..3) };
        pool.push((rank, t));
    }
    pool.shuffle(rng);
    pool.sort_by_key(|&(rank, _)| rank);
    pool.into_iter().take(k).map(|(_, t)| t).collect()
}

/// A simple pMC in normal form, already qualitatively preprocessed.
///
/// Rows are built by stick breaking, so labels are products of `x`, `1-x`
/// and constants in `(0, 1)`, and every row sums to 1.
pub fn random_simple_pmc(seed: u64, spec: RandomSpec) -> Pmc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = spec.num_params;
    loop {
        let n = rng.gen_range(3..=spec.max_states.max(3));
        let names: Vec<String> = (0..m).map(|k| format!("x{k}")).collect();
        let mut pmc = Pmc::new(names, n, n - 1, n - 2);
        for s in 0..n - 2 {
            let k = if spec.max_degree >= 2 { rng.gen_range(1..=3) } else { rng.gen_range(1..=2) };
            let succ = successors(&mut rng, s, n, k);
            match succ.len() {
                1 => pmc.add_transition(s, succ[0], Polynomial::one()),
                2 => {
                    let f = random_factor(&mut rng, m, spec.max_degree);
                    pmc.add_transition(s, succ[0], f.clone());
                    pmc.add_transition(s, succ[1], &Polynomial::one() - &f);
                }
                _ => {
                    let f = random_factor(&mut rng, m, 1);
                    let g = random_factor(&mut rng, m, 1);
                    let nf = &Polynomial::one() - &f;
                    pmc.add_transition(s, succ[0], f.clone());
                    pmc.add_transition(s, succ[1], &nf * &g);
                    pmc.add_transition(s, succ[2], &nf * &(&Polynomial::one() - &g));
                }
            }
        }
        pmc.set_initial(Some(0));
        let (out, _) = qualitative_preprocess(&pmc);
        if out.n() >= 3 && PmcKind::detect(&out).simple {
            return out;
        }
    }
}

/// A trivially parametric pMC in normal form, preprocessed: every
/// non-forced transition carries its own parameter.
pub fn random_trivial_pmc(seed: u64, max_states: usize) -> Pmc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(3..=max_states.max(3));
        let mut pmc = Pmc::new(Vec::new(), n, n - 1, n - 2);
        for s in 0..n - 2 {
            let k = rng.gen_range(1..=3);
            let succ = successors(&mut rng, s, n, k);
            if succ.len() == 1 {
                pmc.add_transition(s, succ[0], Polynomial::one());
                continue;
            }
            for t in succ {
                let x = pmc.add_param(format!("x{}", pmc.num_params()));
                pmc.add_transition(s, t, Polynomial::var(x));
            }
        }
        pmc.set_initial(Some(0));
        let (out, _) = qualitative_preprocess(&pmc);
        if out.n() >= 3 && PmcKind::detect(&out).trivially_parametric {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmc::validate;

    #[test]
    fn simple_generator_is_deterministic_and_valid() {
        let spec = RandomSpec { max_states: 6, num_params: 2, max_degree: 2 };
        for seed in 0..50 {
            let m = random_simple_pmc(seed, spec);
            assert_eq!(m, random_simple_pmc(seed, spec));
            assert!(m.n() <= 6 && m.is_normal_form());
            assert!(m.max_degree() <= 2);
            let kind = PmcKind::detect(&m);
            assert!(validate(&m, kind).is_empty());
        }
    }

    #[test]
    fn trivial_generator_is_valid() {
        for seed in 0..50 {
            let m = random_trivial_pmc(seed, 10);
            assert!(m.n() <= 10 && m.is_normal_form());
            let kind = PmcKind::detect(&m);
            assert!(kind.trivially_parametric);
            assert!(validate(&m, kind).is_empty());
        }
    }
}
