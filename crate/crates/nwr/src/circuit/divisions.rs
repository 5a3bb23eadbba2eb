//! Moving divisions to the outputs and removing them.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::Rational;

use super::{random_point, Circuit, CircuitError, Gate, GateId};

/// Graded gates times `(d+1)^2` is refused above this.
pub const ELIMINATE_LIMIT: usize = 5_000_000;

const POINT_TRIES: usize = 1000;
const CHECK_POINTS: usize = 20;

impl Circuit {
    /// A division-free circuit whose outputs alternate numerator and
    /// denominator of the outputs of `self`.
    ///
    /// Each gate becomes a pair `(n, d)`; a missing `d` stands for 1, so
    /// division-free parts are copied unchanged. Per gate at most 4 new
    /// gates are created.
    pub fn fraction_pairs(&self) -> Circuit {
        let mut c = Circuit::new(self.num_inputs);
        let mut frac: Vec<(GateId, Option<GateId>)> = Vec::with_capacity(self.size());
        for gate in &self.gates {
            let f = match gate {
                Gate::Input(k) => (c.input(*k), None),
                Gate::Const(r) => (c.constant(r.clone()), None),
                Gate::Add(a, b) => match (frac[*a], frac[*b]) {
                    ((n1, None), (n2, None)) => (c.add(n1, n2), None),
                    ((n1, Some(d1)), (n2, None)) | ((n2, None), (n1, Some(d1))) => {
                        let t = c.mul(n2, d1);
                        (c.add(n1, t), Some(d1))
                    }
                    ((n1, Some(d1)), (n2, Some(d2))) => {
                        let l = c.mul(n1, d2);
                        let r = c.mul(n2, d1);
                        (c.add(l, r), Some(c.mul(d1, d2)))
                    }
                },
                Gate::Mul(a, b) => {
                    let ((n1, d1), (n2, d2)) = (frac[*a], frac[*b]);
                    (c.mul(n1, n2), c.mul_opt(d1, d2))
                }
                Gate::Div(a, b) => {
                    // (n1/d1) / (n2/d2) = (n1 d2) / (d1 n2)
                    let ((n1, d1), (n2, d2)) = (frac[*a], frac[*b]);
                    let n = match d2 {
                        Some(d2) => c.mul(n1, d2),
                        None => n1,
                    };
                    let d = match d1 {
                        Some(d1) => c.mul(d1, n2),
                        None => n2,
                    };
                    (n, Some(d))
                }
            };
            frac.push(f);
        }
        let mut outs = Vec::with_capacity(2 * self.outputs.len());
        for &o in &self.outputs {
            let (n, d) = frac[o];
            outs.push(n);
            outs.push(d.unwrap_or_else(|| c.one()));
        }
        c.set_outputs(outs);
        c.prune()
    }

    fn mul_opt(&mut self, a: Option<GateId>, b: Option<GateId>) -> Option<GateId> {
        match (a, b) {
            (Some(a), Some(b)) => Some(self.mul(a, b)),
            (x, None) | (None, x) => x,
        }
    }

    /// Same outputs, with a single division per output and none elsewhere.
    pub fn push_divisions(&self) -> Circuit {
        let pairs = self.fraction_pairs();
        let mut c = pairs.clone();
        let outs: Vec<GateId> = pairs.outputs.chunks(2).map(|nd| c.div(nd[0], nd[1])).collect();
        c.set_outputs(outs);
        c.prune()
    }

    /// A division-free circuit for outputs that are polynomials of degree at
    /// most `d`.
    ///
    /// After pushing divisions each output is `N/D`. Inputs are shifted to a
    /// point `a` with `D(a) != 0`, so `D = c (1 - h)` with `h` lacking a
    /// constant term, and `1/(1-h)` is the truncated series `1 + h + ... + h^d`.
    /// Everything is carried as homogeneous components of degree at most `d`
    /// in the shifted inputs. The result is checked against `self` at random
    /// points; a wrong `d` shows up as [`CircuitError::Mismatch`].
    pub fn eliminate_divisions(&self, d: u64, seed: u64) -> Result<Circuit, CircuitError> {
        let d = d as usize;
        let f = self.fraction_pairs();
        if f.size().saturating_mul((d + 1) * (d + 1)) > ELIMINATE_LIMIT {
            return Err(CircuitError::TooLarge("graded circuit", ELIMINATE_LIMIT));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.num_inputs;
        let nonzero_dens = |v: &[Rational]| match f.eval(v) {
            Ok(vals) => vals.iter().skip(1).step_by(2).all(|x| !x.is_zero()),
            Err(_) => false,
        };
        let a = (0..POINT_TRIES)
            .map(|_| random_point(&mut rng, m))
            .find(|p| nonzero_dens(p))
            .ok_or(CircuitError::NoNonzeroPoint)?;

        let mut c = Circuit::new(m);
        let zero = c.zero();
        let y: Vec<GateId> = (0..m)
            .map(|k| {
                let x = c.input(k);
                let ak = c.constant(a[k].clone());
                c.sub(x, ak)
            })
            .collect();
        let mut graded: Vec<Vec<GateId>> = Vec::with_capacity(f.size());
        for gate in &f.gates {
            let mut g = vec![zero; d + 1];
            match gate {
                Gate::Input(k) => {
                    g[0] = c.constant(a[*k].clone());
                    if d >= 1 {
                        g[1] = y[*k];
                    }
                }
                Gate::Const(r) => g[0] = c.constant(r.clone()),
                Gate::Add(p, q) => {
                    for e in 0..=d {
                        g[e] = c.add(graded[*p][e], graded[*q][e]);
                    }
                }
                Gate::Mul(p, q) => g = c.graded_mul(&graded[*p], &graded[*q]),
                Gate::Div(..) => unreachable!("fraction pairs are division-free"),
            }
            graded.push(g);
        }

        let mut outs = Vec::with_capacity(self.outputs.len());
        for nd in f.outputs.chunks(2) {
            let (num, den) = (&graded[nd[0]], &graded[nd[1]]);
            let c0 = c.as_const(den[0]).cloned().expect("degree-0 part folds to a constant");
            debug_assert!(!c0.is_zero());
            let minus_inv = -Rational::one() / &c0;
            let mut h = vec![zero; d + 1];
            for e in 1..=d {
                h[e] = c.scale(&minus_inv, den[e]);
            }
            // s = 1 + h + ... + h^d, truncated at degree d
            let mut s = vec![zero; d + 1];
            s[0] = c.one();
            for _ in 0..d {
                let hs = c.graded_mul(&h, &s);
                s = hs;
                s[0] = c.one();
            }
            let ns = c.graded_mul(num, &s);
            let total = c.sum(&ns);
            let inv = Rational::one() / &c0;
            outs.push(c.scale(&inv, total));
        }
        c.set_outputs(outs);
        let c = c.prune();

        let mut checked = 0;
        for _ in 0..POINT_TRIES {
            if checked == CHECK_POINTS {
                break;
            }
            let p = random_point(&mut rng, m);
            let Ok(want) = self.eval(&p) else { continue };
            if c.eval(&p)? != want {
                return Err(CircuitError::Mismatch);
            }
            checked += 1;
        }
        Ok(c)
    }

    /// Product of two graded values, truncated to their common length.
    fn graded_mul(&mut self, a: &[GateId], b: &[GateId]) -> Vec<GateId> {
        let d = a.len() - 1;
        let mut out = Vec::with_capacity(d + 1);
        for e in 0..=d {
            let terms: Vec<GateId> = (0..=e).map(|i| self.mul(a[i], b[e - i])).collect();
            out.push(self.sum(&terms));
        }
        out
    }
}
