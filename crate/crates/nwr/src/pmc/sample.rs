use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{is_graph_preserving, Pmc, PmcKind};
use crate::algebra::{Rational, Valuation};

const GRID: i64 = 1 << 16;
const REJECTION_BUDGET: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("no graph-preserving valuation found after {0} tries")]
    Exhausted(usize),
}

/// Interior grid point `k / 2^16` with `1 <= k < 2^16`.
pub(crate) fn grid_point<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(1..GRID)), BigInt::from(GRID))
}

/// Deterministic graph-preserving valuation for `seed`.
pub fn sample_valuation(pmc: &Pmc, kind: PmcKind, seed: u64) -> Result<Valuation, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(pmc, kind, &mut rng)
}

pub(crate) fn sample_with<R: Rng>(pmc: &Pmc, kind: PmcKind, rng: &mut R) -> Result<Valuation, SampleError> {
    let m = pmc.num_params();
    if kind.simple {
        return Ok((0..m).map(|_| grid_point(rng)).collect());
    }
    if kind.trivially_parametric {
        // each state's variables form their own simplex
        let mut v: Valuation = vec![Rational::new(1.into(), 2.into()); m];
        for s in 0..pmc.n() {
            if pmc.is_extremal(s) {
                continue;
            }
            let vars: Vec<usize> = pmc
                .row(s)
                .iter()
                .filter_map(|e| {
                    let p = pmc.poly(e.poly);
                    (p.degree() == 1).then(|| p.leading_term().unwrap().0.pairs()[0].0 as usize)
                })
                .collect();
            let weights: Vec<i64> = vars.iter().map(|_| rng.gen_range(1..=256)).collect();
            let total: i64 = weights.iter().sum();
            for (k, w) in vars.into_iter().zip(weights) {
                v[k] = Rational::new(BigInt::from(w), BigInt::from(total));
            }
        }
        if is_graph_preserving(pmc, &v) {
            return Ok(v);
        }
    }
    for _ in 0..REJECTION_BUDGET {
        let v: Valuation = (0..m).map(|_| grid_point(rng)).collect();
        if is_graph_preserving(pmc, &v) {
            return Ok(v);
        }
    }
    Err(SampleError::Exhausted(REJECTION_BUDGET))
}
