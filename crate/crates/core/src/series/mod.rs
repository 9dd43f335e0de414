//! Exact multivariate power series over the rationals, truncated by total
//! degree, with Adams operations and plethystic exponential/logarithm.

mod expr;
mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{q, Q};

pub use expr::{parse_rational_function, RationalFunction};
pub use poly::{detect_recurrence, expand_rational, Polynomial, RationalFunctionGuess};

/// Exponent vector.
pub type Monomial = Vec<u32>;

/// A power series in `num_vars` variables keeping every term of total degree
/// at most `trunc`. Terms are stored by degree; zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    num_vars: usize,
    trunc: u32,
    parts: Vec<BTreeMap<Monomial, Q>>,
}

fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Möbius function by trial division.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

impl TruncatedSeries {
    pub fn zero(num_vars: usize, trunc: u32) -> Self {
        TruncatedSeries {
            num_vars,
            trunc,
            parts: vec![BTreeMap::new(); trunc as usize + 1],
        }
    }

    pub fn constant(num_vars: usize, trunc: u32, c: Q) -> Self {
        let mut s = Self::zero(num_vars, trunc);
        s.add_term(vec![0; num_vars], c);
        s
    }

    pub fn one(num_vars: usize, trunc: u32) -> Self {
        Self::constant(num_vars, trunc, Q::one())
    }

    /// `x_i`.
    pub fn variable(num_vars: usize, trunc: u32, i: usize) -> Self {
        let mut m = vec![0; num_vars];
        m[i] = 1;
        let mut s = Self::zero(num_vars, trunc);
        s.add_term(m, Q::one());
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs, dropping terms
    /// beyond the truncation.
    pub fn from_terms(num_vars: usize, trunc: u32, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Result<Self> {
        let mut s = Self::zero(num_vars, trunc);
        for (m, c) in terms {
            if m.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    got: m.len(),
                });
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    /// One-variable series with `coeffs[k]` at `x^k`.
    pub fn univariate(coeffs: &[Q], trunc: u32) -> Self {
        let mut s = Self::zero(1, trunc);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term(vec![k as u32], c.clone());
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    /// Adds `c * x^m` unless it exceeds the truncation.
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        let d = degree(&m);
        if d > self.trunc || c.is_zero() {
            return;
        }
        let part = &mut self.parts[d as usize];
        let entry = part.entry(m.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            part.remove(&m);
        }
    }

    pub fn coefficient(&self, m: &[u32]) -> Q {
        let d = degree(m);
        if d > self.trunc {
            return Q::zero();
        }
        self.parts[d as usize].get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&vec![0; self.num_vars])
    }

    /// All nonzero terms by increasing degree, then exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.parts.iter().flat_map(|p| p.iter())
    }

    /// Homogeneous part of degree `d`.
    pub fn part(&self, d: u32) -> &BTreeMap<Monomial, Q> {
        &self.parts[d as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_empty())
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.num_vars != o.num_vars {
            return Err(Error::Series(format!(
                "variable count mismatch: {} vs {}",
                self.num_vars, o.num_vars
            )));
        }
        if self.trunc != o.trunc {
            return Err(Error::Series(format!(
                "truncation mismatch: {} vs {}",
                self.trunc, o.trunc
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let mut out = self.clone();
        for (m, c) in o.terms() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.num_vars, self.trunc);
        if c.is_zero() {
            return out;
        }
        for (d, p) in self.parts.iter().enumerate() {
            out.parts[d] = p.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        }
        out
    }

    /// Product of homogeneous parts `a` and `b`, added into `acc` scaled by
    /// `w`.
    fn mul_parts(acc: &mut BTreeMap<Monomial, Q>, a: &BTreeMap<Monomial, Q>, b: &BTreeMap<Monomial, Q>, w: &Q) {
        for (ma, ca) in a {
            let cw = ca * w;
            for (mb, cb) in b {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                *acc.entry(m).or_insert_with(Q::zero) += &cw * cb;
            }
        }
    }

    fn cleaned(mut p: BTreeMap<Monomial, Q>) -> BTreeMap<Monomial, Q> {
        p.retain(|_, v| !v.is_zero());
        p
    }

    /// Exact product; output degrees are computed in parallel.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let one = Q::one();
        let parts: Vec<BTreeMap<Monomial, Q>> = (0..=self.trunc as usize)
            .into_par_iter()
            .map(|d| {
                let mut acc = BTreeMap::new();
                for i in 0..=d {
                    Self::mul_parts(&mut acc, &self.parts[i], &o.parts[d - i], &one);
                }
                Self::cleaned(acc)
            })
            .collect();
        Ok(TruncatedSeries {
            num_vars: self.num_vars,
            trunc: self.trunc,
            parts,
        })
    }

    /// `log f` for `f(0) = 1`, from `d * L_d = d * f_d - sum_{k<d} k * L_k * f_{d-k}`.
    pub fn log(&self) -> Result<Self> {
        if self.constant_term() != Q::one() {
            return Err(Error::Series("log needs constant term 1".into()));
        }
        let mut out = Self::zero(self.num_vars, self.trunc);
        for d in 1..=self.trunc as usize {
            let mut acc: BTreeMap<Monomial, Q> = self.parts[d]
                .iter()
                .map(|(m, c)| (m.clone(), c * q(d as i64)))
                .collect();
            for k in 1..d {
                Self::mul_parts(&mut acc, &out.parts[k], &self.parts[d - k], &q(-(k as i64)));
            }
            let inv = Q::new(1.into(), (d as i64).into());
            out.parts[d] = Self::cleaned(acc.into_iter().map(|(m, c)| (m, c * &inv)).collect());
        }
        Ok(out)
    }

    /// `exp g` for `g(0) = 0`, from `d * F_d = sum_{k<=d} k * g_k * F_{d-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Series("exp needs constant term 0".into()));
        }
        let mut out = Self::one(self.num_vars, self.trunc);
        for d in 1..=self.trunc as usize {
            let mut acc = BTreeMap::new();
            for k in 1..=d {
                Self::mul_parts(&mut acc, &self.parts[k], &out.parts[d - k], &q(k as i64));
            }
            let inv = Q::new(1.into(), (d as i64).into());
            out.parts[d] = Self::cleaned(acc.into_iter().map(|(m, c)| (m, c * &inv)).collect());
        }
        Ok(out)
    }

    /// `psi_n f = f(x_1^n, ..., x_r^n)`.
    pub fn adams(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Series("Adams operation needs n >= 1".into()));
        }
        let mut out = Self::zero(self.num_vars, self.trunc);
        for (m, c) in self.terms() {
            if degree(m) as u64 * n as u64 <= self.trunc as u64 {
                out.add_term(m.iter().map(|e| e * n).collect(), c.clone());
            }
        }
        Ok(out)
    }

    /// Collapses every variable to a single `x`.
    pub fn specialize(&self) -> Self {
        let mut out = Self::zero(1, self.trunc);
        for (d, p) in self.parts.iter().enumerate() {
            let s: Q = p.values().sum();
            out.add_term(vec![d as u32], s);
        }
        out
    }

    /// Coefficients of `x^0..=x^trunc` of a one-variable series.
    pub fn coefficients(&self) -> Result<Vec<Q>> {
        if self.num_vars != 1 {
            return Err(Error::Series("coefficients() needs a one-variable series".into()));
        }
        Ok((0..=self.trunc).map(|d| self.coefficient(&[d])).collect())
    }

    /// Drops every term above degree `d`.
    pub fn truncate(&self, d: u32) -> Self {
        let mut out = Self::zero(self.num_vars, d);
        for (k, p) in self.parts.iter().enumerate().take(d as usize + 1) {
            out.parts[k] = p.clone();
        }
        out
    }
}

/// `Exp(f) = exp(sum_n psi_n(f) / n)`, for `f(0) = 0`.
pub fn plethystic_exp(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !f.constant_term().is_zero() {
        return Err(Error::Series("Exp needs constant term 0".into()));
    }
    let mut g = TruncatedSeries::zero(f.num_vars, f.trunc);
    for n in 1..=f.trunc.max(1) {
        let term = f.adams(n)?.scale(&Q::new(1.into(), (n as i64).into()));
        g = g.add(&term)?;
    }
    g.exp()
}

/// `Log(f) = sum_n mobius(n) / n * psi_n(log f)`, for `f(0) = 1`.
pub fn plethystic_log(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.constant_term() != Q::one() {
        return Err(Error::Series("Log needs constant term 1".into()));
    }
    let l = f.log()?;
    let mut out = TruncatedSeries::zero(f.num_vars, f.trunc);
    for n in 1..=f.trunc.max(1) {
        let mu = mobius(n as u64);
        if mu == 0 {
            continue;
        }
        let term = l.adams(n)?.scale(&Q::new(mu.into(), (n as i64).into()));
        out = out.add(&term)?;
    }
    Ok(out)
}

pub fn adams(n: u32, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.adams(n)
}

pub fn specialize(f: &TruncatedSeries) -> TruncatedSeries {
    f.specialize()
}

/// Formats `c * x^k` terms joined by ` + `, in ascending degree; several
/// variables print as `x0^a x1^b`.
impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c} * ")?;
            if self.num_vars == 1 {
                write!(f, "x^{}", m[0])?;
            } else {
                let factors: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, e)| format!("x{i}^{e}"))
                    .collect();
                if factors.is_empty() {
                    f.write_str("1")?;
                } else {
                    f.write_str(&factors.join(" "))?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
