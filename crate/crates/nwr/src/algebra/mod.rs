//! Exact rationals and sparse multivariate polynomials over Q.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is
//! graded-lexicographic, so equal polynomials always have identical
//! representations and "leading term" is simply the last map entry.

mod monomial;
mod parse;
mod poly;
mod ratfn;

pub use monomial::Monomial;
pub use parse::{parse_poly, parse_rational, ParseError};
pub use poly::Polynomial;
pub use ratfn::{ratfn_equal, RationalFunction};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// One value per parameter, indexed by parameter id.
pub type Valuation = Vec<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("valuation has {got} entries but parameter x{needed} is referenced")]
    DimensionMismatch { needed: usize, got: usize },
    #[error("polynomial division is not exact")]
    InexactDivision,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("exponent overflow")]
    ExponentOverflow,
}

/// `a/b` as a rational, panics on `b == 0`.
pub fn rat(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn int(a: i64) -> Rational {
    Rational::from_integer(BigInt::from(a))
}

/// Renders `a` or `a/b`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
