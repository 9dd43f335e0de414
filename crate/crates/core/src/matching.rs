//! Perfect matchings of the bipartite graph, seen dually as arrow sets that
//! meet every face of the quiver exactly once.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lp::{q, Bound, LinearProgram, LpOutcome, Q};
use crate::model::TilingSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Arrow indices, ordered by arrow name.
    pub arrows: Vec<usize>,
    /// `chi_M` indexed by arrow.
    pub indicator: Vec<u8>,
}

impl Matching {
    pub fn from_arrows(t: &TilingSpec, mut arrows: Vec<usize>) -> Self {
        arrows.sort_by(|&a, &b| t.arrows[a].name.cmp(&t.arrows[b].name));
        let mut indicator = vec![0; t.arrows.len()];
        for &a in &arrows {
            indicator[a] = 1;
        }
        Matching { arrows, indicator }
    }

    pub fn contains(&self, arrow: usize) -> bool {
        self.indicator[arrow] == 1
    }

    pub fn names(&self, t: &TilingSpec) -> Vec<String> {
        self.arrows.iter().map(|&a| t.arrows[a].name.clone()).collect()
    }

    /// Sorted comma-separated arrow names.
    pub fn serialize(&self, t: &TilingSpec) -> String {
        self.names(t).join(",")
    }

    /// Number of arrows of `content` (a multiset of arrows) lying in the matching.
    pub fn degree(&self, content: &[i64]) -> i64 {
        content
            .iter()
            .zip(&self.indicator)
            .map(|(&c, &x)| c * x as i64)
            .sum()
    }

    pub fn is_perfect(&self, t: &TilingSpec) -> bool {
        t.faces
            .iter()
            .all(|f| f.cycle.iter().filter(|&&a| self.contains(a)).count() == 1)
    }
}

/// Faces containing each arrow (with multiplicity).
pub(crate) fn faces_of_arrows(t: &TilingSpec) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); t.arrows.len()];
    for (fi, f) in t.faces.iter().enumerate() {
        for &a in &f.cycle {
            out[a].push(fi);
        }
    }
    out
}

/// All perfect matchings, sorted lexicographically by their sorted
/// arrow-name lists.
pub fn perfect_matchings(t: &TilingSpec) -> Vec<Matching> {
    let faces_of = faces_of_arrows(t);
    let mut covered = vec![false; t.faces.len()];
    let mut chosen = Vec::new();
    let mut found: Vec<Vec<usize>> = Vec::new();
    search(t, &faces_of, &mut covered, &mut chosen, &mut found);
    let mut out: Vec<Matching> = found
        .into_iter()
        .map(|arrows| Matching::from_arrows(t, arrows))
        .collect();
    out.sort_by_cached_key(|m| m.names(t));
    out
}

fn search(
    t: &TilingSpec,
    faces_of: &[Vec<usize>],
    covered: &mut [bool],
    chosen: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    let available = |a: usize, covered: &[bool]| faces_of[a].iter().all(|&f| !covered[f]);
    // Most constrained uncovered face first.
    let mut best: Option<(usize, usize)> = None;
    for (fi, f) in t.faces.iter().enumerate() {
        if covered[fi] {
            continue;
        }
        let n = f.cycle.iter().filter(|&&a| available(a, covered)).count();
        if best.is_none_or(|(_, b)| n < b) {
            best = Some((fi, n));
        }
    }
    let Some((face, n)) = best else {
        found.push(chosen.clone());
        return;
    };
    if n == 0 {
        return;
    }
    let mut options: Vec<usize> = t.faces[face]
        .cycle
        .iter()
        .copied()
        .filter(|&a| available(a, covered))
        .collect();
    options.dedup();
    for a in options {
        // An arrow repeated inside one face can never be matched.
        if faces_of[a].len() != 2 || faces_of[a][0] == faces_of[a][1] {
            continue;
        }
        for &f in &faces_of[a] {
            covered[f] = true;
        }
        chosen.push(a);
        search(t, faces_of, covered, chosen, found);
        chosen.pop();
        for &f in &faces_of[a] {
            covered[f] = false;
        }
    }
}

/// Returns `(non_degenerate, uncovered arrow names)`.
pub fn is_non_degenerate(t: &TilingSpec) -> (bool, Vec<String>) {
    let ms = perfect_matchings(t);
    let uncovered: Vec<String> = (0..t.arrows.len())
        .filter(|&a| !ms.iter().any(|m| m.contains(a)))
        .map(|a| t.arrows[a].name.clone())
        .collect();
    (uncovered.is_empty(), uncovered)
}

/// Lexicographically smallest perfect matching.
pub fn reference_matching(t: &TilingSpec) -> Result<Matching> {
    perfect_matchings(t).into_iter().next().ok_or(Error::NoMatching)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RCharge {
    /// `R_a` indexed by arrow, each in `(0, 1)`.
    pub values: Vec<Q>,
    /// Optimal distance of the values from the interval endpoints.
    pub slack: Q,
}

impl RCharge {
    pub fn satisfies(&self, t: &TilingSpec) -> bool {
        let in_range = self
            .values
            .iter()
            .all(|r| r.is_positive() && (q(1) - r).is_positive());
        let faces = t
            .faces
            .iter()
            .all(|f| f.cycle.iter().map(|&a| &self.values[a]).sum::<Q>() == q(2));
        let vertices = (0..t.vertex_count).all(|v| {
            let s: Q = t
                .arrows
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let ends = (a.src == v) as i64 + (a.dst == v) as i64;
                    q(ends) * (q(1) - &self.values[i])
                })
                .sum();
            s == q(2)
        });
        in_range && faces && vertices
    }
}

/// Solves for an R-charge maximizing the minimum distance of every `R_a`
/// from `{0, 1}`; arrow ends are counted at each vertex, so a loop counts
/// twice.
pub fn r_charge(t: &TilingSpec) -> Result<RCharge> {
    let n = t.arrows.len();
    let tvar = n;
    let mut lp = LinearProgram::new(vec![Bound::Free; n + 1]);
    lp.objective[tvar] = q(1);
    for a in 0..n {
        let mut lo = vec![q(0); n + 1];
        lo[a] = q(-1);
        lo[tvar] = q(1);
        lp.le.push((lo, q(0)));
        let mut hi = vec![q(0); n + 1];
        hi[a] = q(1);
        hi[tvar] = q(1);
        lp.le.push((hi, q(1)));
    }
    for f in &t.faces {
        let mut row = vec![q(0); n + 1];
        for &a in &f.cycle {
            row[a] += q(1);
        }
        lp.eq.push((row, q(2)));
    }
    for v in 0..t.vertex_count {
        let mut row = vec![q(0); n + 1];
        let mut ends = 0;
        for (i, a) in t.arrows.iter().enumerate() {
            let e = (a.src == v) as i64 + (a.dst == v) as i64;
            ends += e;
            row[i] += q(e);
        }
        lp.eq.push((row, q(ends - 2)));
    }
    match lp.solve() {
        LpOutcome::Optimal { mut x, value } if value.is_positive() => {
            x.pop();
            Ok(RCharge {
                values: x,
                slack: value,
            })
        }
        LpOutcome::Optimal { value, .. } => Err(Error::Infeasible(format!(
            "no R-charge: best margin is {value}"
        ))),
        LpOutcome::Infeasible => Err(Error::Infeasible("no R-charge: constraints inconsistent".into())),
        LpOutcome::Unbounded => Err(Error::Infeasible("R-charge program unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::q_frac;
    use crate::model::{builtin_tiling, parse_tiling};

    /// Brute force over all arrow subsets.
    fn brute(t: &TilingSpec) -> Vec<Vec<String>> {
        let n = t.arrows.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let m = Matching::from_arrows(t, (0..n).filter(|&a| mask >> a & 1 == 1).collect());
            if m.is_perfect(t) {
                out.push(m.names(t));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn c3_and_conifold() {
        let c3 = builtin_tiling("c3", None).unwrap();
        let ms: Vec<String> = perfect_matchings(&c3).iter().map(|m| m.serialize(&c3)).collect();
        assert_eq!(ms, ["x", "y", "z"]);
        let con = builtin_tiling("conifold", None).unwrap();
        let ms: Vec<String> = perfect_matchings(&con).iter().map(|m| m.serialize(&con)).collect();
        assert_eq!(ms, ["x0", "x1", "y0", "y1"]);
        assert_eq!(reference_matching(&c3).unwrap().serialize(&c3), "x");
        assert_eq!(reference_matching(&con).unwrap().serialize(&con), "x0");
    }

    #[test]
    fn agrees_with_brute_force() {
        for (name, p) in [("c3", None), ("conifold", None), ("spp", None), ("dp3", None), ("c3-zn", Some(3))] {
            let t = builtin_tiling(name, p).unwrap();
            let got: Vec<Vec<String>> = perfect_matchings(&t).iter().map(|m| m.names(&t)).collect();
            assert_eq!(got, brute(&t), "{name}");
            for m in perfect_matchings(&t) {
                assert!(m.is_perfect(&t));
                assert_eq!(2 * m.arrows.len(), t.faces.len());
            }
            let (nd, unc) = is_non_degenerate(&t);
            assert!(nd && unc.is_empty(), "{name}");
        }
        let spp = builtin_tiling("spp", None).unwrap();
        assert!(!perfect_matchings(&spp).is_empty());
    }

    #[test]
    fn degenerate_edge_detected() {
        // Not a valid tiling, but it exercises the definition: `a` sits twice
        // in one face and so can never be matched.
        let t = parse_tiling(
            "vertices 1\narrow a 0 0 1 0\narrow b 0 0 0 1\narrow c 0 0 -1 -1\n\
             face + a b c\nface - a a\n",
        )
        .unwrap();
        let (nd, unc) = is_non_degenerate(&t);
        assert!(!nd);
        assert!(unc.contains(&"a".to_string()));
    }

    #[test]
    fn r_charge_examples() {
        let c3 = builtin_tiling("c3", None).unwrap();
        let r = r_charge(&c3).unwrap();
        assert_eq!(r.values, vec![q_frac(2, 3); 3]);
        assert!(r.satisfies(&c3));
        let con = builtin_tiling("conifold", None).unwrap();
        let r = r_charge(&con).unwrap();
        assert_eq!(r.values, vec![q_frac(1, 2); 4]);
        for (name, p) in [("spp", None), ("dp3", None), ("c3-zn", Some(4))] {
            let t = builtin_tiling(name, p).unwrap();
            assert!(r_charge(&t).unwrap().satisfies(&t), "{name}");
        }
    }

    #[test]
    fn serialization_is_stable() {
        let t = builtin_tiling("dp3", None).unwrap();
        let a: Vec<String> = perfect_matchings(&t).iter().map(|m| m.serialize(&t)).collect();
        let b: Vec<String> = perfect_matchings(&t).iter().map(|m| m.serialize(&t)).collect();
        assert_eq!(a, b);
    }
}
