use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::{fmt_rational, AlgebraError, Monomial, Rational};

/// Sparse polynomial with rational coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(k: usize) -> Self {
        Self::term(Rational::one(), Monomial::var(k))
    }

    /// `1 - x_k`.
    pub fn one_minus_var(k: usize) -> Self {
        &Self::one() - &Self::var(k)
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(k)).max().unwrap_or(0)
    }

    /// Largest parameter index used plus one.
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|m| m.num_vars()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, k: usize) -> bool {
        self.terms.keys().any(|m| m.exp(k) > 0)
    }

    /// Largest magnitude among all coefficient numerators and denominators.
    pub fn max_coeff(&self) -> BigUint {
        let mut best = BigUint::zero();
        for c in self.terms.values() {
            for part in [c.numer().magnitude(), c.denom().magnitude()] {
                if part > &best {
                    best = part.clone();
                }
            }
        }
        best
    }

    /// `|supp f| * deg f * ceil(log2(coeff f + 1))`.
    pub fn reps(&self) -> u64 {
        // bit length of c equals ceil(log2(c + 1)) for every natural c
        self.support_size() as u64 * self.degree() * self.max_coeff().bits()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero());
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&c));
        }
        if let Some(c) = self.as_constant() {
            return Ok(other.scale(&c));
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb)?;
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(Polynomial {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Power-rule derivative with respect to `x_k`.
    pub fn partial_derivative(&self, k: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exp(k);
            if e == 0 {
                continue;
            }
            let lowered = m.without_one(k).expect("variable present");
            out.add_term(lowered, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact value at `v`. `v` may be longer than needed.
    pub fn eval(&self, v: &[Rational]) -> Result<Rational, AlgebraError> {
        let nv = self.num_vars();
        if nv > v.len() {
            return Err(AlgebraError::DimensionMismatch { needed: nv - 1, got: v.len() });
        }
        // cache powers per variable; most polynomials here have small exponents
        let mut pows: Vec<Vec<Rational>> = vec![Vec::new(); nv];
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(k, e) in m.pairs() {
                let cache = &mut pows[k as usize];
                if cache.is_empty() {
                    cache.push(Rational::one());
                }
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &v[k as usize];
                    cache.push(next);
                }
                t *= &cache[e as usize];
            }
            total += t;
        }
        Ok(total)
    }

    /// Replaces `x_k` by the polynomial `g`.
    pub fn substitute(&self, k: usize, g: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        let mut pows: Vec<Polynomial> = vec![Polynomial::one()];
        for (m, c) in &self.terms {
            let e = m.exp(k) as usize;
            while pows.len() <= e {
                let next = pows.last().unwrap() * g;
                pows.push(next);
            }
            let rest = Monomial::from_pairs(
                m.pairs().iter().filter(|&&(v, _)| v as usize != k).map(|&(v, e)| (v as usize, e)),
            );
            out = &out + &(&pows[e] * &Polynomial::term(c.clone(), rest));
        }
        out
    }

    /// Quotient `q` with `self = q * g`; errors if `g` does not divide `self`.
    pub fn exact_divide(&self, g: &Polynomial) -> Result<Polynomial, AlgebraError> {
        if g.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(c) = g.as_constant() {
            return Ok(self.scale(&(Rational::one() / c)));
        }
        let (lm, lc) = g.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut q = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let m = rm.div(&lm).ok_or(AlgebraError::InexactDivision)?;
            let c = rc / &lc;
            let t = Polynomial::term(c.clone(), m.clone());
            rem = &rem - &(&t * g);
            q.add_term(m, c);
        }
        Ok(q)
    }

    /// Text form in descending graded-lex order, e.g. `p^2 - p*r + 1/2*r`.
    pub fn render(&self, names: &[String]) -> String {
        self.render_with(names, false)
    }

    /// Same as [`render`](Self::render) but with `pow(x,e)` for PRISM.
    pub fn render_prism(&self, names: &[String]) -> String {
        self.render_with(names, true)
    }

    fn render_with(&self, names: &[String], prism: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(fmt_rational(&mag));
            }
            for &(k, e) in m.pairs() {
                let name = var_name(names, k as usize);
                factors.push(match (e, prism) {
                    (1, _) => name,
                    (_, false) => format!("{name}^{e}"),
                    (_, true) => format!("pow({name},{e})"),
                });
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

pub(crate) fn var_name(names: &[String], k: usize) -> String {
    names.get(k).cloned().unwrap_or_else(|| format!("x{k}"))
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&[]))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&[]))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("exponent overflow in polynomial product")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, parse_poly, rat};
    use super::*;

    fn p(s: &str) -> Polynomial {
        let names = vec!["p".to_string(), "r".to_string()];
        parse_poly(s, &names).unwrap()
    }

    #[test]
    fn eval_closed_forms() {
        let v = vec![rat(1, 2), rat(1, 3)];
        assert_eq!(p("p^2 + r - r*p").eval(&v).unwrap(), rat(5, 12));
        assert_eq!(Polynomial::zero().eval(&v).unwrap(), int(0));
        assert_eq!(p("p - p^2").eval(&[rat(1, 2)]).unwrap(), rat(1, 4));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let err = p("r").eval(&[rat(1, 2)]).unwrap_err();
        assert_eq!(err, AlgebraError::DimensionMismatch { needed: 1, got: 1 });
    }

    #[test]
    fn ring_examples() {
        assert!((&p("p") + &p("-p")).is_zero());
        assert_eq!(&p("1-p") * &p("1-p"), p("1 - 2*p + p^2"));
        assert_eq!(&p("p^2+r") * &Polynomial::one(), p("p^2+r"));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("p^2 + r - r*p").partial_derivative(1), p("1-p"));
        assert!(p("7/3").partial_derivative(0).is_zero());
        assert_eq!(p("r*(1-p)^2 + p*(1-p)").partial_derivative(1), p("(1-p)^2"));
    }

    #[test]
    fn size_measures() {
        let f = p("p^2 + r - r*p");
        assert_eq!((f.degree(), f.support_size()), (2, 3));
        assert_eq!((Polynomial::zero().degree(), Polynomial::zero().support_size()), (0, 0));
        let g = parse_poly("-2*x1*x2*x3", &[]).unwrap();
        assert_eq!(g.degree(), 3);
        assert_eq!(g.max_coeff(), BigUint::from(2u32));
        // 1 term, degree 3, ceil(log2 3) = 2
        assert_eq!(g.reps(), 6);
    }

    #[test]
    fn exact_division_examples() {
        assert_eq!(p("p^2 - p").exact_divide(&p("p")).unwrap(), p("p - 1"));
        assert!(Polynomial::zero().exact_divide(&p("p + r")).unwrap().is_zero());
        let f = &p("1 - 2*p + p^2") * &p("r");
        assert_eq!(f.exact_divide(&p("r")).unwrap(), p("1 - 2*p + p^2"));
        assert_eq!(p("p + 1").exact_divide(&p("r")), Err(AlgebraError::InexactDivision));
        assert_eq!(p("p").exact_divide(&Polynomial::zero()), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn render_is_descending_grlex() {
        let names = vec!["p".to_string(), "r".to_string()];
        assert_eq!(p("r - r*p + p^2").render(&names), "p^2 - p*r + r");
        assert_eq!(p("-1/2*p + 3").render(&names), "-1/2*p + 3");
        assert_eq!(p("p^2").render_prism(&names), "pow(p,2)");
        assert_eq!(Polynomial::zero().render(&names), "0");
    }

    #[test]
    fn substitute_replaces_variable() {
        assert_eq!(p("p*r + r").substitute(1, &p("1-p")), p("1 - p^2"));
    }
}
