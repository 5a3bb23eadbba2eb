//! The four ladder benchmark families.
//!
//! Layout (0-based): state 0 is the start `s`; then the blocks in order
//! (block 1 row 1, block 1 row 2, block 2 row 1, ...), each holding its ladder
//! states 1..n and n+2..2n; then the fail state and the final state, so every
//! generated model is already in normal form.
//!
//! Inside a block the top row is 1..n and the bottom row n+1..2n. Bottom
//! state n+1 would have no incoming edge and is left out.

mod random;

pub use random::{random_simple_pmc, random_trivial_pmc, RandomSpec};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::Polynomial;
use crate::pmc::{Pmc, StateId};

const P: usize = 0;
const Q: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    A,
    B,
    C,
    D,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::A, Variant::B, Variant::C, Variant::D];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Variant {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Variant::A),
            "B" => Ok(Variant::B),
            "C" => Ok(Variant::C),
            "D" => Ok(Variant::D),
            _ => Err(BenchError::UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariantSpec {
    pub variant: Variant,
    pub n: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("ladder length must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("unknown variant {0:?}, expected one of A, B, C, D")]
    UnknownVariant(String),
}

/// `(4n^2 - 2n + 3, 2n + 3)`.
pub fn expected_sizes(spec: VariantSpec) -> (usize, usize) {
    let n = spec.n;
    (4 * n * n - 2 * n + 3, 2 * n + 3)
}

struct Layout {
    n: usize,
}

impl Layout {
    fn block_len(&self) -> usize {
        2 * self.n - 1
    }

    /// State `j` (1..=2n, not n+1) of the block in `row` (0 or 1) and column `col` (0-based).
    fn state(&self, row: usize, col: usize, j: usize) -> StateId {
        debug_assert!(j >= 1 && j <= 2 * self.n && j != self.n + 1);
        let offset = if j <= self.n { j - 1 } else { j - 2 };
        1 + (2 * col + row) * self.block_len() + offset
    }

    fn fail(&self) -> StateId {
        1 + 2 * self.n * self.block_len()
    }

    fn fin(&self) -> StateId {
        self.fail() + 1
    }
}

pub fn generate(spec: VariantSpec) -> Result<Pmc, BenchError> {
    let n = spec.n;
    if n < 2 {
        return Err(BenchError::TooSmall(n));
    }
    let v = spec.variant;
    let lay = Layout { n };
    let total = lay.fin() + 1;
    let mut m = Pmc::new(vec!["p".into(), "q".into()], total, lay.fin(), lay.fail());
    let (p, np) = (Polynomial::var(P), Polynomial::one_minus_var(P));
    let (q, nq) = (Polynomial::var(Q), Polynomial::one_minus_var(Q));
    let one = Polynomial::one();

    m.add_transition(0, lay.state(0, 0, 1), q.clone());
    m.add_transition(0, lay.state(1, 0, 1), nq.clone());

    let row2_exit_is_top = matches!(v, Variant::A | Variant::B);
    let exit = |row: usize, col: usize| {
        if row == 1 && row2_exit_is_top {
            lay.state(row, col, n)
        } else {
            lay.state(row, col, 2 * n)
        }
    };

    for col in 0..n {
        for row in 0..2 {
            let s = |j| lay.state(row, col, j);
            for j in 1..n {
                m.add_transition(s(j), s(j + 1), p.clone());
                m.add_transition(s(j), s(n + j + 1), np.clone());
                if j >= 2 {
                    let (down, up) = match v {
                        Variant::A | Variant::B => (np.clone(), p.clone()),
                        Variant::C | Variant::D => (p.clone(), np.clone()),
                    };
                    m.add_transition(s(n + j), s(n + j + 1), down);
                    m.add_transition(s(n + j), s(j + 1), up);
                }
            }
            if row == 1 && row2_exit_is_top {
                m.add_transition(s(2 * n), s(n), one.clone());
            } else {
                m.add_transition(s(n), s(2 * n), one.clone());
            }
        }

        let (e1, e2) = (exit(0, col), exit(1, col));
        if col + 1 < n {
            let (n1, n2) = (lay.state(0, col + 1, 1), lay.state(1, col + 1, 1));
            match v {
                Variant::A | Variant::C => {
                    m.add_transition(e1, n1, q.clone());
                    m.add_transition(e1, n2, nq.clone());
                    m.add_transition(e2, n2, q.clone());
                    m.add_transition(e2, n1, nq.clone());
                }
                Variant::B => {
                    m.add_transition(e1, n1, q.clone());
                    m.add_transition(e1, n2, nq.clone());
                    m.add_transition(e2, n2, nq.clone());
                    m.add_transition(e2, n1, q.clone());
                }
                Variant::D => {
                    m.add_transition(e1, n1, nq.clone());
                    m.add_transition(e1, n2, q.clone());
                    m.add_transition(e2, n2, q.clone());
                    m.add_transition(e2, n1, nq.clone());
                }
            }
        } else {
            let (fin, fail) = (lay.fin(), lay.fail());
            match v {
                Variant::A => {
                    m.add_transition(e1, fin, q.clone());
                    m.add_transition(e1, fail, nq.clone());
                    m.add_transition(e2, fin, nq.clone());
                    m.add_transition(e2, fail, q.clone());
                }
                Variant::B => {
                    m.add_transition(e1, fin, q.clone());
                    m.add_transition(e1, fail, nq.clone());
                    m.add_transition(e2, fin, q.clone());
                    m.add_transition(e2, fail, nq.clone());
                }
                Variant::C | Variant::D => {
                    m.add_transition(e1, fin, p.clone());
                    m.add_transition(e1, fail, np.clone());
                    m.add_transition(e2, e1, p.clone());
                    m.add_transition(e2, fail, np.clone());
                }
            }
        }
    }

    let mut labels = vec![String::new(); total];
    labels[0] = "s".into();
    for col in 0..n {
        for row in 0..2 {
            for j in (1..=2 * n).filter(|&j| j != n + 1) {
                labels[lay.state(row, col, j)] = format!("b{}.{}.{}", row + 1, col + 1, j);
            }
        }
    }
    labels[lay.fail()] = "0".into();
    labels[lay.fin()] = "1".into();
    m.set_labels(labels);
    m.set_initial(Some(0));
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmc::{validate, PmcKind};

    #[test]
    fn sizes_match_the_table() {
        for v in Variant::ALL {
            for n in [2, 3, 8] {
                let spec = VariantSpec { variant: v, n };
                assert_eq!(generate(spec).unwrap().n(), expected_sizes(spec).0);
            }
        }
        assert_eq!(expected_sizes(VariantSpec { variant: Variant::A, n: 2 }), (15, 7));
        assert_eq!(expected_sizes(VariantSpec { variant: Variant::A, n: 3 }), (33, 9));
        assert_eq!(expected_sizes(VariantSpec { variant: Variant::A, n: 50 }), (9903, 103));
        assert_eq!(expected_sizes(VariantSpec { variant: Variant::C, n: 15 }).0, 873);
        assert_eq!(expected_sizes(VariantSpec { variant: Variant::A, n: 100 }), (39803, 203));
        assert_eq!(expected_sizes(VariantSpec { variant: Variant::A, n: 500 }), (999003, 1003));
    }

    #[test]
    fn generated_models_are_simple_and_well_formed() {
        for v in Variant::ALL {
            let m = generate(VariantSpec { variant: v, n: 3 }).unwrap();
            let kind = PmcKind::detect(&m);
            assert!(kind.simple, "{v}");
            assert!(validate(&m, kind).is_empty(), "{v}");
            assert!(m.is_normal_form());
            assert_eq!(m.params(), ["p", "q"]);
        }
    }

    #[test]
    fn every_state_is_reached_from_the_start() {
        for v in Variant::ALL {
            let m = generate(VariantSpec { variant: v, n: 4 }).unwrap();
            let mut seen = vec![false; m.n()];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(s) = stack.pop() {
                for e in m.row(s) {
                    if !seen[e.to] {
                        seen[e.to] = true;
                        stack.push(e.to);
                    }
                }
            }
            assert!(seen.iter().all(|&b| b), "{v}");
        }
    }

    #[test]
    fn too_small_and_unknown_are_errors() {
        assert_eq!(generate(VariantSpec { variant: Variant::A, n: 1 }).unwrap_err(), BenchError::TooSmall(1));
        assert!("E".parse::<Variant>().is_err());
        assert_eq!("c".parse::<Variant>().unwrap(), Variant::C);
    }
}
