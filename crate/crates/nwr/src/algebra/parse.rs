//! Recursive-descent parser for the polynomial text grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*      division by constants only
//! unary := '-' unary | power
//! power := atom ('^' natural)?
//! atom  := natural | name | '(' expr ')'
//! ```
//! Names resolve against the supplied parameter list first, then `x<k>`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{Polynomial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse polynomial `{input}` at byte {pos}: {msg}")]
pub struct ParseError {
    pub input: String,
    pub pos: usize,
    pub msg: String,
}

pub fn parse_poly(text: &str, names: &[String]) -> Result<Polynomial, ParseError> {
    let mut p = Parser { src: text, bytes: text.as_bytes(), pos: 0, names };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parses `a`, `-a` or `a/b`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let poly = parse_poly(text, &[])?;
    poly.as_constant().ok_or_else(|| ParseError {
        input: text.to_string(),
        pos: 0,
        msg: "expected a rational constant".into(),
    })
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { input: self.src.to_string(), pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    let c = rhs.as_constant().ok_or_else(|| self.err("division by a non-constant"))?;
                    if c.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(&(Rational::one() / c));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.natural()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn natural(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.natural()?;
                Ok(Polynomial::constant(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if let Some(k) = self.names.iter().position(|n| n == name) {
                    return Ok(Polynomial::var(k));
                }
                if let Some(k) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    return Ok(Polynomial::var(k));
                }
                self.pos = start;
                Err(self.err(&format!("unknown parameter `{name}`")))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}
