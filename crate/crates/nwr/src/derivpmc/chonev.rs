//! Rewriting a polynomial as a sub-stochastic combination of literal products.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraError, Monomial, Polynomial, Rational};

/// `x_var`, or `1 - x_var` when `complement` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub complement: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, complement: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, complement: true }
    }

    pub fn to_polynomial(self) -> Polynomial {
        if self.complement {
            Polynomial::one_minus_var(self.var)
        } else {
            Polynomial::var(self.var)
        }
    }

    pub fn eval(self, v: &[Rational]) -> Result<Rational, AlgebraError> {
        let x = v.get(self.var).ok_or(AlgebraError::DimensionMismatch { needed: self.var, got: v.len() })?;
        Ok(if self.complement { Rational::one() - x } else { x.clone() })
    }
}

/// `(a / b) * Π q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChonevTerm {
    pub a: BigInt,
    pub b: BigInt,
    /// Sorted literals, repeated for powers.
    pub q: Vec<Literal>,
}

impl ChonevTerm {
    pub fn weight(&self) -> Rational {
        Rational::new(self.a.clone(), self.b.clone())
    }
}

/// `f = n * (c/d + Σ a_k/b_k Q_k)` with `|c|/d + Σ a_k/b_k <= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChonevForm {
    pub n: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    pub terms: Vec<ChonevTerm>,
}

impl ChonevForm {
    pub fn constant(&self) -> Rational {
        Rational::new(self.c.clone(), self.d.clone())
    }

    /// `|c|/d + Σ a_k/b_k`.
    pub fn mass(&self) -> Rational {
        self.terms.iter().fold(self.constant().abs(), |acc, t| acc + t.weight())
    }

    pub fn eval(&self, v: &[Rational]) -> Result<Rational, AlgebraError> {
        let mut acc = self.constant();
        for t in &self.terms {
            let mut prod = t.weight();
            for l in &t.q {
                prod *= l.eval(v)?;
            }
            acc += prod;
        }
        Ok(acc * Rational::from_integer(self.n.clone()))
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let mut acc = Polynomial::constant(self.constant());
        for t in &self.terms {
            let mut prod = Polynomial::constant(t.weight());
            for l in &t.q {
                prod = &prod * &l.to_polynomial();
            }
            acc = &acc + &prod;
        }
        acc.scale(&Rational::from_integer(self.n.clone()))
    }
}

fn positive_literals(m: &Monomial) -> Vec<Literal> {
    let mut out = Vec::new();
    for &(k, e) in m.pairs() {
        out.extend(std::iter::repeat(Literal::pos(k as usize)).take(e as usize));
    }
    out
}

/// Rational-coefficient form: `f = c + Σ w_k Q_k` with every `w_k > 0`.
pub(crate) fn chonev_terms(f: &Polynomial) -> (Rational, Vec<(Rational, Vec<Literal>)>) {
    let mut rest = f.clone();
    let mut done: BTreeMap<Vec<Literal>, Rational> = BTreeMap::new();
    loop {
        let pick = rest
            .terms()
            .rev()
            .find(|(m, c)| !m.is_one() && c.is_negative())
            .map(|(m, c)| (m.clone(), c.clone()));
        let Some((m, t)) = pick else { break };
        // -|t| x_i R = |t| (1 - x_i) R - |t| R
        let i = m.pairs()[0].0 as usize;
        let r = m.without_one(i).expect("lowest variable divides");
        let mut q = positive_literals(&r);
        q.push(Literal::neg(i));
        q.sort_unstable();
        *done.entry(q).or_insert_with(Rational::zero) += t.abs();
        rest.add_term(m, t.abs());
        rest.add_term(r, t);
    }
    for (m, c) in rest.terms() {
        if !m.is_one() {
            *done.entry(positive_literals(m)).or_insert_with(Rational::zero) += c;
        }
    }
    let terms = done.into_iter().filter(|(_, w)| !w.is_zero()).map(|(q, w)| (w, q)).collect();
    (rest.constant_term(), terms)
}

pub fn chonev_rewrite(f: &Polynomial) -> ChonevForm {
    let (c, terms) = chonev_terms(f);
    let den = terms.iter().fold(c.denom().clone(), |acc, (w, _)| acc.lcm(w.denom()));
    let scaled = |r: &Rational| (r * Rational::from_integer(den.clone())).to_integer();
    let big_c = scaled(&c);
    let mut n = big_c.abs();
    for (w, _) in &terms {
        n += scaled(w);
    }
    if n.is_zero() {
        return ChonevForm { n: BigInt::one(), c: BigInt::zero(), d: BigInt::one(), terms: Vec::new() };
    }
    let dn = &den * &n;
    let reduce = |num: BigInt| {
        let r = Rational::new(num, dn.clone());
        (r.numer().clone(), r.denom().clone())
    };
    let (c, d) = reduce(big_c);
    let terms = terms
        .into_iter()
        .map(|(w, q)| {
            let (a, b) = reduce(scaled(&w));
            ChonevTerm { a, b, q }
        })
        .collect();
    ChonevForm { n, c, d, terms }
}

/// Bernstein expansions are only attempted below this many coefficients.
const BERNSTEIN_LIMIT: usize = 100_000;

/// Sufficient test for `f >= 0` on the closed unit box.
///
/// First the rewrite above: a non-negative constant leaves a sum of positive
/// multiples of literal products, each in `[0, 1]` on the box. If its constant
/// is negative, the tensor Bernstein expansion is tried instead; it is the
/// same kind of literal-product form (with binomial weights and no constant),
/// and it succeeds on squares like `(1-p)^2` where the single rewrite ends on
/// a negative constant.
pub fn chonev_nonneg_certificate(f: &Polynomial) -> bool {
    let (c, _) = chonev_terms(f);
    if !c.is_negative() {
        return true;
    }
    bernstein_nonneg(f).unwrap_or(false)
}

fn binomial_row(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = row[k as usize].clone() * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// Whether all Bernstein coefficients of `f` (per-variable degrees) are
/// non-negative; `None` above the size limit.
pub(crate) fn bernstein_nonneg(f: &Polynomial) -> Option<bool> {
    let vars: Vec<usize> = (0..f.num_vars()).filter(|&k| f.uses_var(k)).collect();
    let degs: Vec<u32> = vars.iter().map(|&k| f.degree_in(k)).collect();
    let mut size = 1usize;
    for &d in &degs {
        size = size.checked_mul(d as usize + 1).filter(|&s| s <= BERNSTEIN_LIMIT)?;
    }
    // dense tensor, axis 0 varies slowest
    let mut strides = vec![1usize; vars.len()];
    for a in (0..vars.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * (degs[a + 1] as usize + 1);
    }
    let mut t = vec![Rational::zero(); size];
    for (m, c) in f.terms() {
        let idx: usize = vars.iter().enumerate().map(|(a, &k)| m.exp(k) as usize * strides[a]).sum();
        t[idx] = c.clone();
    }
    // along each axis: b_k = Σ_{j<=k} C(k,j)/C(n,j) a_j
    for (a, &n) in degs.iter().enumerate() {
        let choose_n = binomial_row(n);
        let rows: Vec<Vec<BigInt>> = (0..=n).map(binomial_row).collect();
        let stride = strides[a];
        let len = n as usize + 1;
        for base in 0..size {
            if (base / stride) % len != 0 {
                continue;
            }
            let old: Vec<Rational> = (0..len).map(|j| t[base + j * stride].clone()).collect();
            for k in 0..len {
                let mut acc = Rational::zero();
                for j in 0..=k {
                    if !old[j].is_zero() {
                        acc += &old[j] * Rational::new(rows[k][j].clone(), choose_n[j].clone());
                    }
                }
                t[base + k * stride] = acc;
            }
        }
    }
    Some(t.iter().all(|b| !b.is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, parse_poly, rat};

    fn names() -> Vec<String> {
        vec!["x1".into(), "x2".into(), "x3".into()]
    }

    #[test]
    fn classic_three_variable_example() {
        let f = parse_poly("-2*x1*x2*x3", &names()).unwrap();
        let form = chonev_rewrite(&f);
        // 2(1-x1)x2x3 + 2(1-x2)x3 + 2(1-x3) - 2, then N = 8
        assert_eq!(form.n, BigInt::from(8));
        assert_eq!(form.constant(), rat(-1, 4));
        let qs: Vec<&Vec<Literal>> = form.terms.iter().map(|t| &t.q).collect();
        assert!(qs.contains(&&vec![Literal::neg(0), Literal::pos(1), Literal::pos(2)]));
        assert!(qs.contains(&&vec![Literal::neg(1), Literal::pos(2)]));
        assert!(qs.contains(&&vec![Literal::neg(2)]));
        assert!(form.terms.iter().all(|t| t.weight() == rat(1, 4)));
        assert_eq!(form.mass(), int(1));
        assert_eq!(form.to_polynomial(), f);
    }

    #[test]
    fn zero_polynomial() {
        let form = chonev_rewrite(&Polynomial::zero());
        assert_eq!((form.n, form.c, form.d), (BigInt::one(), BigInt::zero(), BigInt::one()));
        assert!(form.terms.is_empty());
    }

    #[test]
    fn square_of_complement() {
        let p = vec!["p".to_string()];
        let f = parse_poly("(1-p)^2", &p).unwrap();
        let form = chonev_rewrite(&f);
        assert_eq!(form.to_polynomial(), f);
        assert!(form.mass() <= int(1));
        for k in 0..50 {
            let v = [rat(k, 49)];
            assert_eq!(form.eval(&v).unwrap(), f.eval(&v).unwrap());
        }
        assert!(chonev_nonneg_certificate(&f));
    }

    #[test]
    fn certificate_examples() {
        let p = vec!["p".to_string(), "q".to_string()];
        assert!(!chonev_nonneg_certificate(&Polynomial::constant(int(-1))));
        assert!(chonev_nonneg_certificate(&parse_poly("p - p^2", &p).unwrap()));
        assert!(chonev_nonneg_certificate(&parse_poly("1 - p*q", &p).unwrap()));
        // negative at p = 1/2
        assert!(!chonev_nonneg_certificate(&parse_poly("(2*p-1)^2 - 1/10", &p).unwrap()));
    }

    #[test]
    fn bernstein_of_linear_form() {
        let p = vec!["p".to_string()];
        // 2p - 1 has Bernstein coefficients -1, 1
        assert_eq!(bernstein_nonneg(&parse_poly("2*p - 1", &p).unwrap()), Some(false));
        assert_eq!(bernstein_nonneg(&parse_poly("1 - p", &p).unwrap()), Some(true));
    }

    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::algebra::strategies::{point, poly};

        fn bits(x: &BigInt) -> u64 {
            x.magnitude().bits()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn rewrite_identity_and_bounds(f in poly(3, 5, 3), pts in prop::collection::vec(point(3), 20)) {
                let form = chonev_rewrite(&f);
                for v in &pts {
                    prop_assert_eq!(form.eval(v).unwrap(), f.eval(v).unwrap());
                }
                prop_assert!(form.mass() <= int(1));
                let deg = f.degree() as usize;
                let sd = f.support_size() as u64 * f.degree();
                prop_assert!(form.terms.len() as u64 <= sd);
                prop_assert!(form.terms.iter().all(|t| t.q.len() <= deg && t.a.is_positive() && t.b.is_positive()));
                let bound = (sd + 1) * (f.max_coeff().bits() + 2);
                prop_assert!(bits(&form.n) <= bound);
                prop_assert!(bits(&form.c) <= 2 * bound && bits(&form.d) <= 2 * bound);
                prop_assert!(form.terms.iter().all(|t| bits(&t.a) <= 2 * bound && bits(&t.b) <= 2 * bound));
            }

            #[test]
            fn certificate_is_sound_on_the_box(f in poly(2, 4, 2), k in prop::collection::vec((0i64..=8, 0i64..=8), 30)) {
                if chonev_nonneg_certificate(&f) {
                    for (a, b) in k {
                        prop_assert!(!f.eval(&[rat(a, 8), rat(b, 8)]).unwrap().is_negative());
                    }
                }
            }
        }
    }
}
