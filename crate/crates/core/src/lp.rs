//! Dense two-phase simplex over exact rationals, Bland's rule.
//!
//! Only intended for the tiny feasibility programs that certify positivity
//! and R-charges; no attempt is made at sparse or numerically clever pivots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Free,
    NonNegative,
}

/// `maximize objective . x` subject to `eq` rows (`a . x = b`) and `le` rows
/// (`a . x <= b`).
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub bounds: Vec<Bound>,
    pub objective: Vec<Q>,
    pub eq: Vec<(Vec<Q>, Q)>,
    pub le: Vec<(Vec<Q>, Q)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(bounds: Vec<Bound>) -> Self {
        let n = bounds.len();
        LinearProgram {
            bounds,
            objective: vec![Q::zero(); n],
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars();
        // Column layout: one column per nonnegative variable, two per free
        // variable, then one slack per `le` row.
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
        let mut ncols = 0;
        for b in &self.bounds {
            match b {
                Bound::NonNegative => {
                    col_of.push((ncols, None));
                    ncols += 1;
                }
                Bound::Free => {
                    col_of.push((ncols, Some(ncols + 1)));
                    ncols += 2;
                }
            }
        }
        let nslack = self.le.len();
        let nstruct = ncols + nslack;
        let rows: Vec<(&Vec<Q>, &Q, Option<usize>)> = self
            .eq
            .iter()
            .map(|(a, b)| (a, b, None))
            .chain(self.le.iter().enumerate().map(|(k, (a, b))| (a, b, Some(k))))
            .collect();
        let m = rows.len();
        let width = nstruct + m + 1;
        let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
        for (r, (a, b, slack)) in rows.iter().enumerate() {
            let mut row = vec![Q::zero(); width];
            for (j, coef) in a.iter().enumerate() {
                let (p, neg) = col_of[j];
                row[p] += coef;
                if let Some(nc) = neg {
                    row[nc] -= coef;
                }
            }
            if let Some(k) = slack {
                row[ncols + k] = Q::one();
            }
            row[width - 1] = (*b).clone();
            if row[width - 1].is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[nstruct + r] = Q::one();
            t.push(row);
        }
        let mut basis: Vec<usize> = (0..m).map(|r| nstruct + r).collect();

        // Phase 1: maximize -sum(artificials).
        let mut cost1 = vec![Q::zero(); nstruct + m];
        for c in cost1.iter_mut().skip(nstruct) {
            *c = -Q::one();
        }
        if run_simplex(&mut t, &mut basis, &cost1, nstruct + m) == Pivoting::Unbounded {
            unreachable!("phase one objective is bounded");
        }
        let infeas: Q = basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= nstruct)
            .map(|(r, _)| t[r][width - 1].clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.len() {
            if basis[r] >= nstruct {
                if let Some(j) = (0..nstruct).find(|&j| !t[r][j].is_zero()) {
                    pivot(&mut t, &mut basis, r, j);
                    r += 1;
                } else {
                    t.remove(r);
                    basis.remove(r);
                }
            } else {
                r += 1;
            }
        }

        // Phase 2 on structural columns only.
        let mut cost2 = vec![Q::zero(); nstruct + m];
        for (j, c) in self.objective.iter().enumerate() {
            let (p, neg) = col_of[j];
            cost2[p] = c.clone();
            if let Some(nc) = neg {
                cost2[nc] = -c.clone();
            }
        }
        if run_simplex(&mut t, &mut basis, &cost2, nstruct) == Pivoting::Unbounded {
            return LpOutcome::Unbounded;
        }
        let mut col_val = vec![Q::zero(); nstruct];
        for (r, &b) in basis.iter().enumerate() {
            if b < nstruct {
                col_val[b] = t[r][width - 1].clone();
            }
        }
        let x: Vec<Q> = col_of
            .iter()
            .map(|&(p, neg)| match neg {
                Some(nc) => &col_val[p] - &col_val[nc],
                None => col_val[p].clone(),
            })
            .collect();
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[derive(PartialEq)]
enum Pivoting {
    Optimal,
    Unbounded,
}

fn pivot(t: &mut [Vec<Q>], basis: &mut [usize], r: usize, j: usize) {
    let p = t[r][j].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    basis[r] = j;
}

/// Maximizes `cost . x` using columns `< allowed`.
fn run_simplex(t: &mut [Vec<Q>], basis: &mut [usize], cost: &[Q], allowed: usize) -> Pivoting {
    let width = t.first().map_or(0, |r| r.len());
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut rc = cost[j].clone();
            for (r, &b) in basis.iter().enumerate() {
                if !t[r][j].is_zero() {
                    rc -= &cost[b] * &t[r][j];
                }
            }
            rc.is_positive()
        });
        let Some(j) = entering else {
            return Pivoting::Optimal;
        };
        let mut best: Option<(usize, Q)> = None;
        for r in 0..t.len() {
            if t[r][j].is_positive() {
                let ratio = &t[r][width - 1] / &t[r][j];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && basis[r] < basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = best else {
            return Pivoting::Unbounded;
        };
        pivot(t, basis, r, j);
    }
}
