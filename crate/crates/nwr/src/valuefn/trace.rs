//! The elimination replayed on an arithmetic circuit.
//!
//! Every entry update becomes `(piv * e - f * p) / prev` in gates. The
//! symbolic elimination runs in lockstep and decides the zero tests, so the
//! pivot sequence and the skipped entries are exactly those of
//! [`value_functions`](super::value_functions).

use crate::algebra::Polynomial;
use crate::circuit::{Circuit, GateId};
use crate::pmc::Pmc;

use super::{augmented, build_system, ValueError};

/// One circuit holding numerator and denominator gates for every state.
#[derive(Clone, Debug)]
pub struct ValueCircuits {
    pub circuit: Circuit,
    pub num: Vec<GateId>,
    pub den: Vec<GateId>,
}

impl ValueCircuits {
    /// Circuit with outputs `[num_i, den_i]`.
    pub fn pair(&self, i: usize) -> Circuit {
        self.circuit.with_outputs(&[self.num[i], self.den[i]])
    }

    /// Circuit with the single output `num_i / den_i`.
    pub fn value(&self, i: usize) -> Circuit {
        let mut c = self.circuit.clone();
        let q = c.div(self.num[i], self.den[i]);
        c.with_outputs(&[q])
    }
}

pub fn value_function_circuits(pmc: &Pmc) -> Result<ValueCircuits, ValueError> {
    let mut m = augmented(&build_system(pmc)?);
    let n = m.len();
    let mut c = Circuit::new(pmc.num_params());
    let mut g: Vec<Vec<GateId>> = m.iter().map(|row| row.iter().map(|p| c.polynomial(p)).collect()).collect();
    let mut prev: Option<(Polynomial, GateId)> = None;
    for k in 0..n {
        if m[k][k].is_zero() {
            let r = (k + 1..n).find(|&r| !m[r][k].is_zero()).ok_or(ValueError::Singular(k))?;
            m.swap(k, r);
            g.swap(k, r);
        }
        let (prow, grow) = (m[k].clone(), g[k].clone());
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k].clone();
            let gf = g[i][k];
            for j in 0..=n {
                let entry = &m[i][j];
                let (scaled, gs) = if f.is_zero() || prow[j].is_zero() {
                    if entry.is_zero() {
                        continue;
                    }
                    (&prow[k] * entry, c.mul(grow[k], g[i][j]))
                } else {
                    let l = c.mul(grow[k], g[i][j]);
                    let r = c.mul(gf, grow[j]);
                    (&(&prow[k] * entry) - &(&f * &prow[j]), c.sub(l, r))
                };
                let (p, gp) = match &prev {
                    Some((pp, gpp)) => (scaled.exact_divide(pp)?, c.div(gs, *gpp)),
                    None => (scaled, gs),
                };
                m[i][j] = p;
                g[i][j] = gp;
            }
        }
        prev = Some((prow[k].clone(), grow[k]));
    }
    let num = (0..n).map(|i| g[i][n]).collect();
    let den = (0..n).map(|i| g[i][i]).collect();
    Ok(ValueCircuits { circuit: c, num, den })
}
