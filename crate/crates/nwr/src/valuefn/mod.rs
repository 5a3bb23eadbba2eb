//! Reachability value functions as exact rational functions.
//!
//! The system `(I - A) y = e_target` is diagonalized by fraction-free
//! Gauss-Jordan elimination: at step `k` every row other than `k` is updated
//! with `M_ij <- (M_kk M_ij - M_ik M_kj) / prev`, where `prev` is the previous
//! pivot. Every division is exact, and at the end each diagonal entry equals
//! the determinant up to sign, so `g_i = b_i / a_i`.

mod acyclic;
mod numeric;
mod trace;

pub use acyclic::{acyclic_value_polynomials, ACYCLIC_SUPPORT_LIMIT};
pub use numeric::{evaluate_values, NumericError};
pub use trace::{value_function_circuits, ValueCircuits};

use thiserror::Error;

use crate::algebra::{AlgebraError, Polynomial, RationalFunction};
use crate::pmc::Pmc;

/// Symbolic elimination is refused above this many states.
pub const SYMBOLIC_LIMIT: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("model is not in normal form (target must be state n, sink state n-1)")]
    NotNormalForm,
    #[error("system is singular: no non-zero pivot in column {0}")]
    Singular(usize),
    #[error("{0} states exceed the symbolic limit of {SYMBOLIC_LIMIT}")]
    TooLarge(usize),
    #[error("intermediate value with {0} terms exceeds the support limit")]
    SupportTooLarge(usize),
    #[error("model has a cycle through a non-extremal state")]
    Cyclic,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `(I - A) y = rhs` with the extremal rows of `A` zeroed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub a: Vec<Vec<Polynomial>>,
    pub rhs: Vec<Polynomial>,
}

/// `a_i y_i = b_i` for every `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSystem {
    pub a: Vec<Polynomial>,
    pub b: Vec<Polynomial>,
}

pub fn build_system(pmc: &Pmc) -> Result<LinearSystem, ValueError> {
    if !pmc.is_normal_form() {
        return Err(ValueError::NotNormalForm);
    }
    let n = pmc.n();
    if n > SYMBOLIC_LIMIT {
        return Err(ValueError::TooLarge(n));
    }
    let mut a = vec![vec![Polynomial::zero(); n]; n];
    for i in 0..n {
        if pmc.is_extremal(i) {
            continue;
        }
        for e in pmc.row(i) {
            a[i][e.to] = pmc.poly(e.poly).clone();
        }
    }
    let mut rhs = vec![Polynomial::zero(); n];
    rhs[pmc.target()] = Polynomial::one();
    Ok(LinearSystem { a, rhs })
}

/// The augmented matrix `[I - A | rhs]`.
pub(crate) fn augmented(sys: &LinearSystem) -> Vec<Vec<Polynomial>> {
    let n = sys.a.len();
    (0..n)
        .map(|i| {
            let mut row: Vec<Polynomial> = (0..n)
                .map(|j| {
                    let id = if i == j { Polynomial::one() } else { Polynomial::zero() };
                    &id - &sys.a[i][j]
                })
                .collect();
            row.push(sys.rhs[i].clone());
            row
        })
        .collect()
}

/// Runs the elimination on an augmented matrix.
pub(crate) fn eliminate(mut m: Vec<Vec<Polynomial>>) -> Result<Vec<Vec<Polynomial>>, ValueError> {
    let n = m.len();
    let mut prev: Option<Polynomial> = None;
    for k in 0..n {
        if m[k][k].is_zero() {
            let r = (k + 1..n).find(|&r| !m[r][k].is_zero()).ok_or(ValueError::Singular(k))?;
            m.swap(k, r);
        }
        let pivot_row = m[k].clone();
        let piv = &pivot_row[k];
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let f = row[k].clone();
            for (j, entry) in row.iter_mut().enumerate() {
                let scaled = if f.is_zero() || pivot_row[j].is_zero() {
                    if entry.is_zero() {
                        continue;
                    }
                    piv * &*entry
                } else {
                    &(piv * &*entry) - &(&f * &pivot_row[j])
                };
                *entry = match &prev {
                    Some(p) => scaled.exact_divide(p)?,
                    None => scaled,
                };
            }
        }
        prev = Some(pivot_row[k].clone());
    }
    Ok(m)
}

pub fn bareiss_eliminate(sys: &LinearSystem) -> Result<DiagonalSystem, ValueError> {
    let n = sys.a.len();
    let m = eliminate(augmented(sys))?;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for (i, row) in m.into_iter().enumerate() {
        let mut row = row;
        b.push(row.pop().expect("augmented column"));
        a.push(row.swap_remove(i));
    }
    Ok(DiagonalSystem { a, b })
}

/// `g_i = b_i / a_i` for every state.
pub fn value_functions(pmc: &Pmc) -> Result<Vec<RationalFunction>, ValueError> {
    let diag = bareiss_eliminate(&build_system(pmc)?)?;
    let out: Vec<RationalFunction> = diag
        .a
        .into_iter()
        .zip(diag.b)
        .map(|(a, b)| RationalFunction::new(b, a))
        .collect::<Result<_, _>>()?;
    debug_assert!(within_degree_bound(pmc, &out));
    Ok(out)
}

/// `n * d` where `d` is the largest label degree; every numerator and
/// denominator produced above is an `n`-minor of `I - A`.
pub fn degree_bound(pmc: &Pmc) -> u64 {
    pmc.n() as u64 * pmc.max_degree().max(1)
}

fn within_degree_bound(pmc: &Pmc, g: &[RationalFunction]) -> bool {
    let bound = degree_bound(pmc);
    g.iter().all(|f| f.num.degree() <= bound && f.den.degree() <= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, ratfn_equal};
    use crate::pmc::fixtures::{diamond, chain_model};

    fn closed(text: &str) -> RationalFunction {
        let names = vec!["p".to_string(), "r".to_string()];
        RationalFunction::from_poly(parse_poly(text, &names).unwrap())
    }

    #[test]
    fn chain_model_closed_forms() {
        let g = value_functions(&chain_model()).unwrap();
        assert!(ratfn_equal(&g[0], &closed("r*(1-p)^2 + p*(1-p)")));
        assert!(ratfn_equal(&g[1], &closed("1-p")));
        assert!(ratfn_equal(&g[2], &closed("p-p^2")));
        assert!(g[3].is_zero());
        assert!(ratfn_equal(&g[4], &closed("1")));
    }

    #[test]
    fn diamond_closed_forms() {
        let g = value_functions(&diamond()).unwrap();
        assert!(ratfn_equal(&g[0], &closed("p^2 + r - r*p")));
        assert!(ratfn_equal(&g[1], &closed("r*p + r - r^2")));
        assert!(ratfn_equal(&g[2], &closed("p")));
        assert!(ratfn_equal(&g[3], &closed("r")));
    }

    #[test]
    fn two_state_system_is_the_identity() {
        let m = Pmc::new(vec![], 2, 1, 0);
        let sys = build_system(&m).unwrap();
        assert_eq!(sys.rhs, vec![Polynomial::zero(), Polynomial::one()]);
        let d = bareiss_eliminate(&sys).unwrap();
        assert_eq!(d.a, vec![Polynomial::one(), Polynomial::one()]);
        assert_eq!(d.b, vec![Polynomial::zero(), Polynomial::one()]);
    }

    #[test]
    fn chain_model_system_shape() {
        let sys = build_system(&chain_model()).unwrap();
        assert_eq!(sys.a.len(), 5);
        assert!(sys.a[3].iter().chain(&sys.a[4]).all(Polynomial::is_zero));
        assert_eq!(sys.rhs.iter().filter(|p| !p.is_zero()).count(), 1);
    }

    #[test]
    fn not_normal_form_is_rejected() {
        let m = Pmc::new(vec![], 3, 0, 1);
        assert_eq!(build_system(&m), Err(ValueError::NotNormalForm));
    }

    #[test]
    fn self_loop_needs_division() {
        // s loops with p and leaves to the target with 1-p
        let mut m = Pmc::new(vec!["p".into()], 3, 2, 1);
        let names = m.params().to_vec();
        m.add_transition(0, 0, parse_poly("p", &names).unwrap());
        m.add_transition(0, 2, parse_poly("1-p", &names).unwrap());
        let g = value_functions(&m).unwrap();
        assert!(ratfn_equal(&g[0], &closed("1")));
    }

    #[test]
    fn singular_and_swapped_systems() {
        // s -> s with probability 1 makes the first pivot 1 - 1 = 0
        let mut m = Pmc::new(vec![], 3, 2, 1);
        m.add_transition(0, 0, Polynomial::one());
        assert_eq!(value_functions(&m), Err(ValueError::Singular(0)));
        // I - A = [[0,1,0],[1,1,0],[0,0,1]] needs a row exchange first
        let c = |k: i64| Polynomial::constant(crate::algebra::int(k));
        let sys = LinearSystem {
            a: vec![vec![c(1), c(-1), c(0)], vec![c(-1), c(0), c(0)], vec![c(0), c(0), c(0)]],
            rhs: vec![c(1), c(2), c(3)],
        };
        let d = bareiss_eliminate(&sys).unwrap();
        let y: Vec<_> = (0..3).map(|i| d.b[i].exact_divide(&d.a[i]).unwrap()).collect();
        assert_eq!(y, vec![c(1), c(1), c(3)]);
    }

    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::algebra::rat;
        use crate::benchgen::{random_simple_pmc, RandomSpec};

        const SPEC: RandomSpec = RandomSpec { max_states: 7, num_params: 2, max_degree: 2 };

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn fixed_point_and_degree_bound(seed in any::<u64>()) {
                let m = random_simple_pmc(seed, SPEC);
                let g = value_functions(&m).unwrap();
                prop_assert!(within_degree_bound(&m, &g));
                prop_assert!(g[m.target()].num == g[m.target()].den);
                prop_assert!(g[m.sink()].is_zero());
                for i in (0..m.n()).filter(|&i| !m.is_extremal(i)) {
                    // g_i = Σ p_ij g_j over the common denominator, which is shared
                    let den = &g[i].den;
                    let mut rhs = Polynomial::zero();
                    for e in m.row(i) {
                        let gj = &g[e.to];
                        prop_assert!(&gj.den == den);
                        rhs = &rhs + &(m.poly(e.poly) * &gj.num);
                    }
                    prop_assert_eq!(&rhs, &g[i].num);
                }
            }

            #[test]
            fn numeric_solver_agrees(seed in any::<u64>(), a in 1i64..16, b in 1i64..16) {
                let m = random_simple_pmc(seed, SPEC);
                let g = value_functions(&m).unwrap();
                let v = [rat(a, 16), rat(b, 16)];
                let num = evaluate_values(&m, &v).unwrap();
                for s in 0..m.n() {
                    prop_assert_eq!(&num[s], &g[s].eval(&v).unwrap());
                }
            }
        }
    }
}
