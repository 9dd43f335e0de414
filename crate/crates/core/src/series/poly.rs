use std::fmt;

use num_traits::{One, Zero};

use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::lp::Q;

/// Dense univariate polynomial with rational coefficients, lowest degree
/// first and no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    pub coeffs: Vec<Q>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Q::from_integer(x.into())).collect())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![Q::zero(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(Q::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{c} * x^{k}"))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Power series of `num / den` through degree `trunc`.
pub fn expand_rational(num: &Polynomial, den: &Polynomial, trunc: u32) -> Result<TruncatedSeries> {
    let d0 = den.coeff(0);
    if d0.is_zero() {
        return Err(Error::Series("denominator vanishes at x = 0".into()));
    }
    let mut c: Vec<Q> = Vec::with_capacity(trunc as usize + 1);
    for n in 0..=trunc as usize {
        let mut v = num.coeff(n);
        for k in 1..=n.min(den.coeffs.len().saturating_sub(1)) {
            v -= &den.coeffs[k] * &c[n - k];
        }
        c.push(v / &d0);
    }
    Ok(TruncatedSeries::univariate(&c, trunc))
}

/// A rational function whose expansion matches the input sequence at every
/// index through `valid_through`. The denominator has constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionGuess {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
    pub valid_through: usize,
}

/// Shortest linear recurrence of `seq` (with `seq[i]` the coefficient of
/// `x^i`) found by Berlekamp-Massey over the rationals. Returns `None` when
/// the recurrence order `L` is too large to be supported by the data, i.e.
/// when `2 (L + 1) > seq.len()`.
pub fn detect_recurrence(seq: &[Q]) -> Option<RationalFunctionGuess> {
    let n = seq.len();
    let mut c = vec![Q::one()];
    let mut b = vec![Q::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Q::one();
    for i in 0..n {
        let mut d = seq[i].clone();
        for j in 1..=l.min(c.len() - 1) {
            d += &c[j] * &seq[i - j];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Q::zero());
        }
        for (j, bj) in b.iter().enumerate() {
            c[j + m] -= &coef * bj;
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = prev;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    if 2 * (l + 1) > n {
        return None;
    }
    c.truncate(l + 1);
    let denominator = Polynomial::new(c);
    // Numerator: the product with the sequence, cut below degree L.
    let mut num = vec![Q::zero(); l];
    for (k, slot) in num.iter_mut().enumerate() {
        for j in 0..=k {
            *slot += denominator.coeff(j) * &seq[k - j];
        }
    }
    Some(RationalFunctionGuess {
        numerator: Polynomial::new(num),
        denominator,
        valid_through: n.saturating_sub(1),
    })
}
