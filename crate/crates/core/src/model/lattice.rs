//! The weight lattice `Z^{Q_1} / <d_2(F) - d_2(F')>` and its positivity
//! functional.

use num_traits::{Signed, Zero};

use super::TilingSpec;
use crate::error::{Error, Result};
use crate::lp::{q, Bound, LinearProgram, LpOutcome, Q};

/// Smith normal form `U * A * V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
    /// Nonzero diagonal entries, each dividing the next.
    pub invariants: Vec<i64>,
}

pub fn smith_normal_form(a: &[Vec<i64>], ncols: usize) -> Smith {
    let m = a.len();
    let n = ncols;
    let mut d: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..m).map(|i| unit_row(m, i)).collect();
    let mut v: Vec<Vec<i64>> = (0..n).map(|i| unit_row(n, i)).collect();
    let mut invariants = Vec::new();

    for k in 0..m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = smallest_entry(&d, k, n) else {
            break;
        };
        d.swap(k, pi);
        u.swap(k, pi);
        swap_cols(&mut d, k, pj);
        swap_cols(&mut v, k, pj);
        loop {
            let mut dirty = false;
            for i in k + 1..m {
                if d[i][k] != 0 {
                    let f = d[i][k] / d[k][k];
                    row_axpy(&mut d, i, k, -f);
                    row_axpy(&mut u, i, k, -f);
                    if d[i][k] != 0 {
                        d.swap(k, i);
                        u.swap(k, i);
                        dirty = true;
                    }
                }
            }
            for j in k + 1..n {
                if d[k][j] != 0 {
                    let f = d[k][j] / d[k][k];
                    col_axpy(&mut d, j, k, -f);
                    col_axpy(&mut v, j, k, -f);
                    if d[k][j] != 0 {
                        swap_cols(&mut d, k, j);
                        swap_cols(&mut v, k, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row.
            let p = d[k][k];
            let bad = (k + 1..m).find(|&i| (k + 1..n).any(|j| d[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_axpy(&mut d, k, i, 1);
                    row_axpy(&mut u, k, i, 1);
                }
                None => break,
            }
        }
        if d[k][k] < 0 {
            for x in d[k].iter_mut() {
                *x = -*x;
            }
            for x in u[k].iter_mut() {
                *x = -*x;
            }
        }
        invariants.push(d[k][k]);
    }
    Smith {
        u,
        v,
        d,
        invariants,
    }
}

fn unit_row(n: usize, i: usize) -> Vec<i64> {
    let mut r = vec![0; n];
    r[i] = 1;
    r
}

fn smallest_entry(d: &[Vec<i64>], k: usize, n: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i64)> = None;
    for (i, row) in d.iter().enumerate().skip(k) {
        for (j, &x) in row.iter().enumerate().take(n).skip(k) {
            if x != 0 && best.is_none_or(|(_, _, b)| x.abs() < b) {
                best = Some((i, j, x.abs()));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn swap_cols(mat: &mut [Vec<i64>], a: usize, b: usize) {
    for row in mat.iter_mut() {
        row.swap(a, b);
    }
}

/// row[dst] += f * row[src]
fn row_axpy(mat: &mut [Vec<i64>], dst: usize, src: usize, f: i64) {
    let s = mat[src].clone();
    for (x, y) in mat[dst].iter_mut().zip(s) {
        *x += f * y;
    }
}

/// col[dst] += f * col[src]
fn col_axpy(mat: &mut [Vec<i64>], dst: usize, src: usize, f: i64) {
    for row in mat.iter_mut() {
        row[dst] += f * row[src];
    }
}

/// `Lambda` with explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightLattice {
    pub ambient_rank: usize,
    /// Rows `d_2(F) - d_2(F_0)` for `F != F_0`, `F_0` the first face.
    pub relation_basis: Vec<Vec<i64>>,
    pub lattice_rank: usize,
    /// `ambient_rank x lattice_rank` matrix; coordinates of `x` are `x * coord`.
    pub coord: Vec<Vec<i64>>,
    pub arrow_weight: Vec<Vec<i64>>,
    pub omega_bar: Vec<i64>,
}

impl WeightLattice {
    /// Lattice coordinates of an arrow-content vector.
    pub fn coord_of(&self, content: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.lattice_rank];
        for (a, &c) in content.iter().enumerate() {
            if c != 0 {
                for (o, &w) in out.iter_mut().zip(&self.coord[a]) {
                    *o += c * w;
                }
            }
        }
        out
    }
}

pub fn weight_lattice(t: &TilingSpec) -> Result<WeightLattice> {
    let n = t.arrows.len();
    if t.faces.is_empty() {
        return Err(Error::InvalidTiling("tiling has no faces".into()));
    }
    let f0 = t.face_boundary(0);
    let relation_basis: Vec<Vec<i64>> = (1..t.faces.len())
        .map(|f| {
            t.face_boundary(f)
                .iter()
                .zip(&f0)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let snf = smith_normal_form(&relation_basis, n);
    if snf.invariants.iter().any(|&d| d != 1) {
        return Err(Error::Torsion(snf.invariants.clone()));
    }
    let r = snf.invariants.len();
    let coord: Vec<Vec<i64>> = snf.v.iter().map(|row| row[r..].to_vec()).collect();
    let arrow_weight = coord.clone();
    let mut wl = WeightLattice {
        ambient_rank: n,
        relation_basis,
        lattice_rank: n - r,
        coord,
        arrow_weight,
        omega_bar: Vec::new(),
    };
    wl.omega_bar = wl.coord_of(&f0);
    Ok(wl)
}

/// A rational functional on `Lambda` positive on arrows with `R(omega_bar) = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCertificate {
    pub functional: Vec<Q>,
    /// Optimal minimum of `R(a)` over arrows.
    pub min_slack: Q,
}

impl PositivityCertificate {
    pub fn eval(&self, weight: &[i64]) -> Q {
        self.functional
            .iter()
            .zip(weight)
            .map(|(r, &w)| r * q(w))
            .sum()
    }
}

/// Maximizes the minimum arrow value `t` subject to `R(a) >= t` and
/// `R(omega_bar) = 2`; succeeds iff the optimum is positive.
pub fn positivity_certificate(w: &WeightLattice) -> Result<PositivityCertificate> {
    let r = w.lattice_rank;
    let mut lp = LinearProgram::new(vec![Bound::Free; r + 1]);
    lp.objective[r] = q(1);
    for aw in &w.arrow_weight {
        let mut row: Vec<Q> = aw.iter().map(|&x| -q(x)).collect();
        row.push(q(1));
        lp.le.push((row, q(0)));
    }
    let mut cap = vec![Q::zero(); r + 1];
    cap[r] = q(1);
    lp.le.push((cap, q(1)));
    let mut norm: Vec<Q> = w.omega_bar.iter().map(|&x| q(x)).collect();
    norm.push(Q::zero());
    lp.eq.push((norm, q(2)));
    match lp.solve() {
        LpOutcome::Optimal { mut x, value } if value.is_positive() => {
            x.pop();
            Ok(PositivityCertificate {
                functional: x,
                min_slack: value,
            })
        }
        LpOutcome::Optimal { value, .. } => Err(Error::Infeasible(format!(
            "best minimum arrow value is {value}; some nonnegative arrow combination has weight 0"
        ))),
        other => Err(Error::Infeasible(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::q_frac;
    use crate::model::builtin_tiling;

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let k = b.len();
        let n = b.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| (0..k).map(|l| row[l] * b[l][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn snf_known_matrix() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a, 3);
        assert_eq!(s.invariants, vec![2, 6, 12]);
        assert_eq!(mat_mul(&mat_mul(&s.u, &a), &s.v), s.d);
    }

    #[test]
    fn c3_lattice_is_standard() {
        let w = weight_lattice(&builtin_tiling("c3", None).unwrap()).unwrap();
        assert_eq!(w.lattice_rank, 3);
        assert_eq!(w.arrow_weight, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(w.omega_bar, vec![1, 1, 1]);
    }

    #[test]
    fn conifold_rank_four() {
        let w = weight_lattice(&builtin_tiling("conifold", None).unwrap()).unwrap();
        assert_eq!(w.lattice_rank, 4);
    }

    #[test]
    fn lattice_invariants_on_builtins() {
        for (name, p) in [("c3", None), ("conifold", None), ("spp", None), ("dp3", None), ("c3-zn", Some(3))] {
            let t = builtin_tiling(name, p).unwrap();
            let w = weight_lattice(&t).unwrap();
            for rel in &w.relation_basis {
                assert!(w.coord_of(rel).iter().all(|&x| x == 0), "{name}");
            }
            for f in 0..t.faces.len() {
                assert_eq!(w.coord_of(&t.face_boundary(f)), w.omega_bar, "{name}");
            }
            // Full row rank: some lattice_rank x lattice_rank minor is +-1,
            // which holds since coord is a column block of a unimodular matrix.
            let rank = crate::model::smith_normal_form(&transpose(&w.coord), t.arrows.len()).invariants;
            assert_eq!(rank.len(), w.lattice_rank);
            assert!(rank.iter().all(|&d| d == 1));
        }
        let spp = weight_lattice(&builtin_tiling("spp", None).unwrap()).unwrap();
        assert_eq!(spp.lattice_rank, 7 - 2);
    }

    fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let c = m.first().map_or(0, |r| r.len());
        (0..c).map(|j| m.iter().map(|r| r[j]).collect()).collect()
    }

    #[test]
    fn positivity_examples() {
        let c3 = weight_lattice(&builtin_tiling("c3", None).unwrap()).unwrap();
        let cert = positivity_certificate(&c3).unwrap();
        for aw in &c3.arrow_weight {
            assert_eq!(cert.eval(aw), q_frac(2, 3));
        }
        let con = weight_lattice(&builtin_tiling("conifold", None).unwrap()).unwrap();
        let cert = positivity_certificate(&con).unwrap();
        for aw in &con.arrow_weight {
            assert_eq!(cert.eval(aw), q_frac(1, 2));
        }
        for name in ["spp", "dp3"] {
            let w = weight_lattice(&builtin_tiling(name, None).unwrap()).unwrap();
            let cert = positivity_certificate(&w).unwrap();
            assert!(w.arrow_weight.iter().all(|aw| cert.eval(aw).is_positive()));
            assert_eq!(cert.eval(&w.omega_bar), q(2));
        }
    }

    #[test]
    fn torsion_detected() {
        // Two relations 2e_0 force Z/2 torsion.
        let s = smith_normal_form(&[vec![2, 0], vec![0, 0]], 2);
        assert_eq!(s.invariants, vec![2]);
    }
}
