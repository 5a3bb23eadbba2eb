use num_traits::Zero;

use super::{AlgebraError, Polynomial, Rational};

/// `num / den` with `den` not the zero polynomial. No gcd reduction is attempted;
/// equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, v: &[Rational]) -> Result<Rational, AlgebraError> {
        let d = self.den.eval(v)?;
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.num.eval(v)? / d)
    }

    /// Quotient-rule derivative, returned as `(num' den - num den') / den^2`.
    pub fn partial_derivative(&self, k: usize) -> RationalFunction {
        let num = &(&self.num.partial_derivative(k) * &self.den) - &(&self.num * &self.den.partial_derivative(k));
        RationalFunction { num, den: &self.den * &self.den }
    }

    /// Cancels a common polynomial factor if it divides both parts exactly.
    pub fn divide_out(&self, g: &Polynomial) -> Option<RationalFunction> {
        let num = self.num.exact_divide(g).ok()?;
        let den = self.den.exact_divide(g).ok()?;
        Some(RationalFunction { num, den })
    }
}

/// `a.num * b.den == b.num * a.den`.
pub fn ratfn_equal(a: &RationalFunction, b: &RationalFunction) -> bool {
    &a.num * &b.den == &b.num * &a.den
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        ratfn_equal(self, other)
    }
}
