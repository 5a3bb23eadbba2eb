use std::cmp::Ordering;

use super::AlgebraError;

/// Sparse exponent vector: sorted `(variable, exponent)` pairs, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(k: usize) -> Self {
        Monomial(vec![(k as u32, 1)])
    }

    pub fn var_pow(k: usize, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(k as u32, e)])
        }
    }

    /// Builds from arbitrary pairs, merging repeated variables and dropping zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|&(_, e)| e > 0)
            .map(|(k, e)| (k as u32, e))
            .collect();
        v.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
        for (k, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += e,
                _ => out.push((k, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exp(&self, k: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(v, _)| v as usize == k)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Largest variable index plus one (0 for the unit monomial).
    pub fn num_vars(&self) -> usize {
        self.0.last().map(|&(k, _)| k as usize + 1).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, AlgebraError> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1.checked_add(b[j].1).ok_or(AlgebraError::ExponentOverflow)?;
                    out.push((a[i].0, e));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Monomial(out))
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(k, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < k {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == k {
                let f = other.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((k, e - f));
                }
                j += 1;
            } else {
                out.push((k, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Lowers the exponent of `k` by one; `None` if `k` is absent.
    pub fn without_one(&self, k: usize) -> Option<Monomial> {
        let pos = self.0.iter().position(|&(v, _)| v as usize == k)?;
        let mut out = self.0.clone();
        if out[pos].1 == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic with x0 the most significant variable.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        loop {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        // the one holding the smaller variable has a positive
                        // exponent where the other has zero
                        return if va < vb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
            i += 1;
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
