//! Parser for rational functions in one variable `x`, as written by hand:
//! `(x + 2x^2 + x^3)/(1 - x^6)^2`, `1/(1-x)`, `3/4 x^2`.
//!
//! Grammar, with implicit multiplication before `x` and `(`:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary | unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | 'x' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::One;

use super::{expand_rational, Polynomial, TruncatedSeries};
use crate::error::{Error, Result};
use crate::lp::Q;

/// `num / den`, not reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl RationalFunction {
    fn poly(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: Polynomial::constant(Q::one()),
        }
    }

    fn add(&self, o: &Self) -> Self {
        RationalFunction {
            numerator: self
                .numerator
                .mul(&o.denominator)
                .add(&o.numerator.mul(&self.denominator)),
            denominator: self.denominator.mul(&o.denominator),
        }
    }

    fn neg(&self) -> Self {
        RationalFunction {
            numerator: self.numerator.neg(),
            denominator: self.denominator.clone(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        RationalFunction {
            numerator: self.numerator.mul(&o.numerator),
            denominator: self.denominator.mul(&o.denominator),
        }
    }

    fn recip(&self, pos: usize) -> Result<Self> {
        if self.numerator.is_zero() {
            return Err(Error::Expr {
                pos,
                msg: "division by zero".into(),
            });
        }
        Ok(RationalFunction {
            numerator: self.denominator.clone(),
            denominator: self.numerator.clone(),
        })
    }

    /// Power series expansion through degree `trunc`.
    pub fn expand(&self, trunc: u32) -> Result<TruncatedSeries> {
        expand_rational(&self.numerator, &self.denominator, trunc)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Expr {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    acc = acc.mul(&self.unary()?.recip(at)?);
                }
                Some(b'x') | Some(b'(') => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.pos;
        let e: u32 = match u32::try_from(self.integer()?) {
            Ok(e) if e <= 4096 => e,
            _ => return self.err("exponent too large"),
        };
        let p = RationalFunction {
            numerator: base.numerator.pow(e),
            denominator: base.denominator.pow(e),
        };
        if negative {
            p.recip(at)
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(RationalFunction::poly(Polynomial::x()))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RationalFunction::poly(Polynomial::constant(Q::from_integer(n))))
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a rational function of `x`.
pub fn parse_rational_function(text: &str) -> Result<RationalFunction> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    if out.denominator.is_zero() {
        return p.err("zero denominator");
    }
    Ok(out)
}
