//! A finite window of the universal cover, the shortest-path table `mu`
//! relative to a reference perfect matching, and the path poset modeled as
//! classes `(cover endpoint, k)`.
//!
//! A class `(v, k)` stands for the paths from the base to `v` whose
//! `M0`-degree is `mu(v) + k`. All such paths have the same weight, so the
//! class is a single element of the poset.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::lp::Q;
use crate::matching::Matching;
use crate::model::{positivity_certificate, weight_lattice, TilingSpec, WeightLattice};

pub type Cell = (i32, i32);

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverVertex {
    pub vertex: usize,
    pub cell: Cell,
}

impl CoverVertex {
    pub fn new(vertex: usize, cell: Cell) -> Self {
        CoverVertex { vertex, cell }
    }
}

impl fmt::Display for CoverVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@({},{})", self.vertex, self.cell.0, self.cell.1)
    }
}

/// A lift of a quiver arrow, identified by the cell of its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverArrow {
    pub arrow: usize,
    pub cell: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathClass {
    pub end: CoverVertex,
    pub k: u32,
}

impl PathClass {
    pub fn new(vertex: usize, cell: Cell, k: u32) -> Self {
        PathClass {
            end: CoverVertex::new(vertex, cell),
            k,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MuTable {
    pub tiling: TilingSpec,
    pub m0: Matching,
    pub base: CoverVertex,
    pub window_radius: u32,
    /// Cells with Chebyshev norm at most this are safe to navigate: their
    /// neighbors lie in the window and their `mu` passed the recheck.
    pub trusted_radius: u32,
    pub stabilized: bool,
    side: i32,
    /// Indexed by window slot; `NONE` when unreachable.
    mu: Vec<u32>,
    /// `(arrow, source slot)` of the witness path's last step.
    parent: Vec<(u32, u32)>,
    /// Integer-scaled positivity grade of each witness path.
    grade: Vec<i64>,
    arrow_grade: Vec<i64>,
    omega_grade: i64,
    /// Per slot: `(arrow, neighbor slot or NONE)`.
    out_edges: Vec<Vec<(u32, u32)>>,
    in_edges: Vec<Vec<(u32, u32)>>,
}

/// Integer arrow grades proportional to a positive functional on the weight
/// lattice, together with the grade of the face cycle.
pub fn arrow_grades(t: &TilingSpec, w: &WeightLattice) -> Result<(Vec<i64>, i64)> {
    let cert = positivity_certificate(w)?;
    let vals: Vec<Q> = w.arrow_weight.iter().map(|aw| cert.eval(aw)).collect();
    let scale = vals
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let to_int = |v: &Q| -> Result<i64> {
        (v * Q::from_integer(scale.clone()))
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::ResourceLimit("arrow grade overflow".into()))
    };
    let grades = vals.iter().map(to_int).collect::<Result<Vec<_>>>()?;
    debug_assert!(vals.iter().all(|v| v.is_positive()));
    let omega = t.faces[0].cycle.iter().map(|&a| grades[a]).sum();
    Ok((grades, omega))
}

impl MuTable {
    fn slot(&self, v: &CoverVertex) -> Option<usize> {
        slot_of(self.tiling.vertex_count, self.window_radius, v)
    }

    pub(crate) fn slot_vertex(&self, s: usize) -> CoverVertex {
        let n = self.tiling.vertex_count;
        let r = self.window_radius as i32;
        let v = s % n;
        let c = (s / n) as i32;
        CoverVertex::new(v, (c / self.side - r, c % self.side - r))
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.mu.len()
    }

    pub(crate) fn is_trusted(&self, s: usize) -> bool {
        let c = self.slot_vertex(s).cell;
        c.0.unsigned_abs().max(c.1.unsigned_abs()) <= self.trusted_radius
    }

    /// Whether `v` lies in the region where the table is known to be exact.
    pub fn is_trusted_vertex(&self, v: &CoverVertex) -> bool {
        v.cell.0.unsigned_abs().max(v.cell.1.unsigned_abs()) <= self.trusted_radius
    }

    pub(crate) fn slot_of_vertex(&self, v: &CoverVertex) -> Option<usize> {
        self.slot(v)
    }

    pub(crate) fn out_edges(&self, s: usize) -> &[(u32, u32)] {
        &self.out_edges[s]
    }

    pub(crate) fn in_edges(&self, s: usize) -> &[(u32, u32)] {
        &self.in_edges[s]
    }

    pub(crate) fn chi(&self, arrow: u32) -> u32 {
        self.m0.indicator[arrow as usize] as u32
    }

    /// Total-order grade of the class `(slot, k)`; strictly increases along
    /// every arrow step.
    pub(crate) fn class_grade(&self, s: usize, k: u32) -> i64 {
        self.grade[s] + k as i64 * self.omega_grade
    }

    pub fn omega_grade(&self) -> i64 {
        self.omega_grade
    }

    pub fn arrow_grade(&self) -> &[i64] {
        &self.arrow_grade
    }

    pub fn mu(&self, v: &CoverVertex) -> Option<u32> {
        self.slot(v).map(|s| self.mu[s]).filter(|&m| m != NONE)
    }

    fn trusted_slot(&self, v: &CoverVertex) -> Result<usize> {
        match self.slot(v) {
            Some(s) if self.is_trusted(s) && self.mu[s] != NONE => Ok(s),
            _ => Err(self.exhausted(format!("{v} outside trusted region"))),
        }
    }

    pub(crate) fn exhausted(&self, msg: String) -> Error {
        Error::WindowExhausted {
            radius: self.window_radius,
            msg,
        }
    }

    /// Arrow content of the witness shortest path from the base to `v`.
    pub fn rep_content(&self, v: &CoverVertex) -> Option<Vec<i64>> {
        let mut s = self.slot(v)?;
        if self.mu[s] == NONE {
            return None;
        }
        let mut content = vec![0; self.tiling.arrows.len()];
        while self.parent[s].0 != NONE {
            let (a, p) = self.parent[s];
            content[a as usize] += 1;
            s = p as usize;
        }
        Some(content)
    }

    pub(crate) fn child_k(&self, s: usize, k: u32, arrow: u32, t: usize) -> u32 {
        k + self.mu[s] + self.chi(arrow) - self.mu[t]
    }

    /// `None` when the candidate would have negative `k`.
    pub(crate) fn pred_k(&self, t: usize, k: u32, arrow: u32, s: usize) -> Option<u32> {
        let v = k as i64 + self.mu[t] as i64 - self.chi(arrow) as i64 - self.mu[s] as i64;
        (v >= 0).then_some(v as u32)
    }

    pub fn class_children(&self, c: &PathClass) -> Result<Vec<(usize, PathClass)>> {
        let s = self.trusted_slot(&c.end)?;
        self.out_edges[s]
            .iter()
            .map(|&(a, t)| {
                if t == NONE || self.mu[t as usize] == NONE {
                    return Err(self.exhausted(format!("child of {} along arrow {a}", c.end)));
                }
                let t = t as usize;
                Ok((
                    a as usize,
                    PathClass {
                        end: self.slot_vertex(t),
                        k: self.child_k(s, c.k, a, t),
                    },
                ))
            })
            .collect()
    }

    pub fn class_predecessors(&self, c: &PathClass) -> Result<Vec<(usize, PathClass)>> {
        let t = self.trusted_slot(&c.end)?;
        let mut out = Vec::new();
        for &(a, s) in &self.in_edges[t] {
            if s == NONE || self.mu[s as usize] == NONE {
                return Err(self.exhausted(format!("predecessor of {} along arrow {a}", c.end)));
            }
            let s = s as usize;
            if let Some(k) = self.pred_k(t, c.k, a, s) {
                out.push((
                    a as usize,
                    PathClass {
                        end: self.slot_vertex(s),
                        k,
                    },
                ));
            }
        }
        Ok(out)
    }

    /// Lattice weight of every path in the class.
    pub fn class_weight(&self, w: &WeightLattice, c: &PathClass) -> Result<Vec<i64>> {
        let content = self
            .rep_content(&c.end)
            .ok_or_else(|| self.exhausted(format!("{} unreachable", c.end)))?;
        let mut wt = w.coord_of(&content);
        for (x, o) in wt.iter_mut().zip(&w.omega_bar) {
            *x += c.k as i64 * o;
        }
        Ok(wt)
    }

    /// Whether a lift belongs to the canonical matching `I0`; `None` outside
    /// the window.
    pub fn in_canonical(&self, a: &CoverArrow) -> Option<bool> {
        let arrow = &self.tiling.arrows[a.arrow];
        let s = self.slot(&CoverVertex::new(arrow.src, a.cell))?;
        let tcell = (a.cell.0 + arrow.shift.0, a.cell.1 + arrow.shift.1);
        let t = self.slot(&CoverVertex::new(arrow.dst, tcell))?;
        if self.mu[s] == NONE || self.mu[t] == NONE {
            return None;
        }
        Some(self.child_k(s, 0, a.arrow as u32, t) >= 1)
    }

    /// `I0` restricted to lifts with both ends in the trusted region.
    pub fn canonical_matching(&self) -> Result<Vec<CoverArrow>> {
        if !self.stabilized {
            return Err(Error::NotStabilized(self.window_radius));
        }
        let mut out = Vec::new();
        for s in 0..self.slot_count() {
            if !self.is_trusted(s) {
                continue;
            }
            let cell = self.slot_vertex(s).cell;
            for &(a, t) in &self.out_edges[s] {
                if t != NONE && self.is_trusted(t as usize) {
                    let ca = CoverArrow {
                        arrow: a as usize,
                        cell,
                    };
                    if self.in_canonical(&ca) == Some(true) {
                        out.push(ca);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Lines `vertex dx dy mu` for every reachable window vertex.
    pub fn dump(&self) -> String {
        let mut rows: Vec<(usize, i32, i32, u32)> = (0..self.slot_count())
            .filter(|&s| self.mu[s] != NONE)
            .map(|s| {
                let v = self.slot_vertex(s);
                (v.vertex, v.cell.0, v.cell.1, self.mu[s])
            })
            .collect();
        rows.sort();
        let mut out = String::from("# vertex dx dy mu\n");
        for (v, dx, dy, m) in rows {
            out += &format!("{v} {dx} {dy} {m}\n");
        }
        out
    }
}

fn slot_of(n: usize, radius: u32, v: &CoverVertex) -> Option<usize> {
    let r = radius as i32;
    let (x, y) = v.cell;
    if x.abs() > r || y.abs() > r || v.vertex >= n {
        return None;
    }
    let side = 2 * r + 1;
    Some((((x + r) * side + (y + r)) as usize) * n + v.vertex)
}

struct Search {
    mu: Vec<u32>,
    parent: Vec<(u32, u32)>,
    out_edges: Vec<Vec<(u32, u32)>>,
    in_edges: Vec<Vec<(u32, u32)>>,
}

fn search(t: &TilingSpec, m0: &Matching, base: usize, radius: u32) -> Result<Search> {
    let n = t.vertex_count;
    let r = radius as i32;
    let side = 2 * r + 1;
    let count = (side * side) as usize * n;
    let out_lists: Vec<Vec<usize>> = (0..n).map(|v| t.out_arrows(v).collect()).collect();
    let in_lists: Vec<Vec<usize>> = (0..n).map(|v| t.in_arrows(v).collect()).collect();
    let mut out_edges = vec![Vec::new(); count];
    let mut in_edges = vec![Vec::new(); count];
    for s in 0..count {
        let v = s % n;
        let c = (s / n) as i32;
        let cell = (c / side - r, c % side - r);
        for &a in &out_lists[v] {
            let ar = &t.arrows[a];
            let tc = (cell.0 + ar.shift.0, cell.1 + ar.shift.1);
            let tgt = slot_of(n, radius, &CoverVertex::new(ar.dst, tc)).map_or(NONE, |x| x as u32);
            out_edges[s].push((a as u32, tgt));
        }
        for &a in &in_lists[v] {
            let ar = &t.arrows[a];
            let sc = (cell.0 - ar.shift.0, cell.1 - ar.shift.1);
            let src = slot_of(n, radius, &CoverVertex::new(ar.src, sc)).map_or(NONE, |x| x as u32);
            in_edges[s].push((a as u32, src));
        }
    }

    // Zero-weight arcs must be acyclic; Kahn's algorithm on that subgraph.
    let mut indeg = vec![0u32; count];
    for edges in &out_edges {
        for &(a, tgt) in edges {
            if tgt != NONE && m0.indicator[a as usize] == 0 {
                indeg[tgt as usize] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..count).filter(|&s| indeg[s] == 0).collect();
    let mut seen = 0;
    while let Some(s) = queue.pop() {
        seen += 1;
        for &(a, tgt) in &out_edges[s] {
            if tgt != NONE && m0.indicator[a as usize] == 0 {
                indeg[tgt as usize] -= 1;
                if indeg[tgt as usize] == 0 {
                    queue.push(tgt as usize);
                }
            }
        }
    }
    if seen != count {
        return Err(Error::Inconsistent(
            "a nontrivial cycle of the cover avoids the reference matching".into(),
        ));
    }

    let mut mu = vec![NONE; count];
    let mut parent = vec![(NONE, NONE); count];
    let b = slot_of(n, radius, &CoverVertex::new(base, (0, 0))).expect("base in window");
    mu[b] = 0;
    let mut dq = VecDeque::from([b]);
    while let Some(s) = dq.pop_front() {
        for &(a, tgt) in &out_edges[s] {
            if tgt == NONE {
                continue;
            }
            let w = m0.indicator[a as usize] as u32;
            let nd = mu[s] + w;
            let ti = tgt as usize;
            if nd < mu[ti] {
                mu[ti] = nd;
                parent[ti] = (a, s as u32);
                if w == 0 {
                    dq.push_front(ti);
                } else {
                    dq.push_back(ti);
                }
            }
        }
    }
    Ok(Search {
        mu,
        parent,
        out_edges,
        in_edges,
    })
}

/// Largest absolute shift component, at least 1.
fn max_shift(t: &TilingSpec) -> u32 {
    t.arrows
        .iter()
        .map(|a| a.shift.0.unsigned_abs().max(a.shift.1.unsigned_abs()))
        .max()
        .unwrap_or(1)
        .max(1)
}

/// Builds the table at `radius` and rechecks it at `radius + 1`.
pub fn mu_table(t: &TilingSpec, m0: &Matching, base_vertex: usize, radius: u32) -> Result<MuTable> {
    t.check_vertex(base_vertex)?;
    if radius == 0 {
        return Err(Error::InvalidParameter {
            name: "radius".into(),
            msg: "must be at least 1".into(),
        });
    }
    if !m0.is_perfect(t) {
        return Err(Error::InvalidMatching("reference is not a perfect matching".into()));
    }
    let w = weight_lattice(t)?;
    let (arrow_grade, omega_grade) = arrow_grades(t, &w)?;
    let n = t.vertex_count;
    let main = search(t, m0, base_vertex, radius)?;
    let wider = search(t, m0, base_vertex, radius + 1)?;
    let trusted_radius = (radius - 1).saturating_sub(max_shift(t) - 1);
    let mut stabilized = true;
    for (s, &m) in main.mu.iter().enumerate() {
        let c = (s / n) as i32;
        let side = 2 * radius as i32 + 1;
        let cell = (c / side - radius as i32, c % side - radius as i32);
        if cell.0.unsigned_abs().max(cell.1.unsigned_abs()) + 1 > radius {
            continue;
        }
        let ws = slot_of(n, radius + 1, &CoverVertex::new(s % n, cell)).unwrap();
        if wider.mu[ws] != m {
            stabilized = false;
            break;
        }
    }
    // Grades along the witness tree, in order of increasing mu then BFS.
    let count = main.mu.len();
    let mut grade = vec![0i64; count];
    let mut done = vec![false; count];
    for s in 0..count {
        if main.mu[s] == NONE || done[s] {
            continue;
        }
        let mut chain = vec![s];
        let mut cur = s;
        while main.parent[cur].0 != NONE && !done[main.parent[cur].1 as usize] {
            cur = main.parent[cur].1 as usize;
            chain.push(cur);
        }
        for &x in chain.iter().rev() {
            let (a, p) = main.parent[x];
            grade[x] = if a == NONE {
                0
            } else {
                grade[p as usize] + arrow_grade[a as usize]
            };
            done[x] = true;
        }
    }
    let mt = MuTable {
        tiling: t.clone(),
        m0: m0.clone(),
        base: CoverVertex::new(base_vertex, (0, 0)),
        window_radius: radius,
        trusted_radius,
        stabilized,
        side: 2 * radius as i32 + 1,
        mu: main.mu,
        parent: main.parent,
        grade,
        arrow_grade,
        omega_grade,
        out_edges: main.out_edges,
        in_edges: main.in_edges,
    };
    for s in 0..mt.slot_count() {
        if mt.is_trusted(s) && mt.mu[s] == NONE {
            return Err(Error::InvalidTiling(format!(
                "{} unreachable from the base",
                mt.slot_vertex(s)
            )));
        }
    }
    Ok(mt)
}

/// Grows the radius from `min_radius` until the recheck passes, giving up
/// after `extra` enlargements.
pub fn stable_mu_table(
    t: &TilingSpec,
    m0: &Matching,
    base_vertex: usize,
    min_radius: u32,
    extra: u32,
) -> Result<MuTable> {
    for r in min_radius..=min_radius + extra {
        let mt = mu_table(t, m0, base_vertex, r)?;
        if mt.stabilized {
            return Ok(mt);
        }
    }
    Err(Error::NotStabilized(min_radius + extra))
}

/// Default window for ideals of size at most `max_size`.
pub fn default_radius(t: &TilingSpec, max_size: u32) -> u32 {
    max_size.max(1) * max_shift(t) + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{perfect_matchings, reference_matching};
    use crate::model::builtin_tiling;
    use std::collections::{BTreeSet, HashSet};

    fn builtins() -> Vec<TilingSpec> {
        ["c3", "conifold", "spp", "dp3"]
            .iter()
            .map(|n| builtin_tiling(n, None).unwrap())
            .chain([builtin_tiling("c3-zn", Some(3)).unwrap()])
            .collect()
    }

    fn c3_with_z() -> (TilingSpec, Matching) {
        let t = builtin_tiling("c3", None).unwrap();
        let m = Matching::from_arrows(&t, vec![2]);
        (t, m)
    }

    /// Exhaustive minimum z-count over monotone lattice walks, by DP on the
    /// number of each step used: reaching (a, b) with p x-steps, q y-steps
    /// and r z-steps needs p - r = a, q - r = b.
    fn brute_c3_mu(a: i32, b: i32) -> u32 {
        (0..40)
            .filter(|&r| r + a >= 0 && r + b >= 0)
            .min()
            .unwrap() as u32
    }

    #[test]
    fn c3_mu_formula() {
        let (t, m) = c3_with_z();
        let mt = mu_table(&t, &m, 0, 6).unwrap();
        assert!(mt.stabilized);
        for a in -5..=5 {
            for b in -5..=5 {
                let mu = mt.mu(&CoverVertex::new(0, (a, b))).unwrap();
                assert_eq!(mu, 0.max(-a).max(-b) as u32);
                assert_eq!(mu, brute_c3_mu(a, b));
            }
        }
    }

    #[test]
    fn triangle_inequality_and_witnesses() {
        for t in builtins() {
            for m in perfect_matchings(&t) {
                let mt = mu_table(&t, &m, 0, 4).unwrap();
                assert_eq!(mt.mu(&mt.base), Some(0));
                for s in 0..mt.slot_count() {
                    if mt.mu[s] == NONE {
                        continue;
                    }
                    for &(a, tg) in &mt.out_edges[s] {
                        if tg != NONE && mt.mu[tg as usize] != NONE {
                            assert!(mt.mu[tg as usize] <= mt.mu[s] + mt.chi(a));
                        }
                    }
                    let v = mt.slot_vertex(s);
                    let content = mt.rep_content(&v).unwrap();
                    assert_eq!(m.degree(&content) as u32, mt.mu[s]);
                    // The witness content ends at v.
                    let (mut dx, mut dy) = (0, 0);
                    for (a, &c) in content.iter().enumerate() {
                        dx += c as i32 * t.arrows[a].shift.0;
                        dy += c as i32 * t.arrows[a].shift.1;
                    }
                    assert_eq!((dx, dy), v.cell);
                }
            }
        }
    }

    #[test]
    fn c3_children_and_predecessors() {
        let (t, m) = c3_with_z();
        let mt = mu_table(&t, &m, 0, 6).unwrap();
        let root = PathClass::new(0, (0, 0), 0);
        let ch = mt.class_children(&root).unwrap();
        assert_eq!(
            ch,
            vec![
                (0, PathClass::new(0, (1, 0), 0)),
                (1, PathClass::new(0, (0, 1), 0)),
                (2, PathClass::new(0, (-1, -1), 0)),
            ]
        );
        assert!(mt.class_predecessors(&root).unwrap().is_empty());
        let x2y = PathClass::new(0, (2, 1), 0);
        let preds: BTreeSet<PathClass> = mt
            .class_predecessors(&x2y)
            .unwrap()
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        assert_eq!(
            preds,
            BTreeSet::from([PathClass::new(0, (1, 1), 0), PathClass::new(0, (2, 0), 0)])
        );
    }

    #[test]
    fn conifold_root_children() {
        let t = builtin_tiling("conifold", None).unwrap();
        let mt = mu_table(&t, &reference_matching(&t).unwrap(), 0, 4).unwrap();
        let arrows: Vec<&str> = mt
            .class_children(&PathClass::new(0, (0, 0), 0))
            .unwrap()
            .iter()
            .map(|(a, _)| t.arrows[*a].name.as_str())
            .collect();
        assert_eq!(arrows, ["x0", "y1"]);
    }

    #[test]
    fn children_predecessors_duality() {
        for t in builtins() {
            let mt = mu_table(&t, &reference_matching(&t).unwrap(), 0, 5).unwrap();
            let inner: Vec<usize> = (0..mt.slot_count())
                .filter(|&s| {
                    let c = mt.slot_vertex(s).cell;
                    c.0.abs().max(c.1.abs()) <= 2
                })
                .collect();
            for &s in &inner {
                for k in 0..3 {
                    let c = PathClass {
                        end: mt.slot_vertex(s),
                        k,
                    };
                    for (a, p) in mt.class_predecessors(&c).unwrap() {
                        assert!(mt.class_children(&p).unwrap().contains(&(a, c)));
                    }
                    for (a, ch) in mt.class_children(&c).unwrap() {
                        if mt.is_trusted(mt.slot(&ch.end).unwrap()) {
                            assert!(mt.class_predecessors(&ch).unwrap().contains(&(a, c)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_weights() {
        let t = builtin_tiling("c3", None).unwrap();
        let w = weight_lattice(&t).unwrap();
        let mt = mu_table(&t, &reference_matching(&t).unwrap(), 0, 4).unwrap();
        assert_eq!(mt.class_weight(&w, &PathClass::new(0, (0, 0), 0)).unwrap(), [0, 0, 0]);
        assert_eq!(mt.class_weight(&w, &PathClass::new(0, (0, 0), 1)).unwrap(), [1, 1, 1]);
        // Distinct classes have distinct (endpoint, weight) pairs.
        for t in builtins() {
            let w = weight_lattice(&t).unwrap();
            let mt = mu_table(&t, &reference_matching(&t).unwrap(), 0, 4).unwrap();
            let mut seen = HashSet::new();
            for s in 0..mt.slot_count() {
                if !mt.is_trusted(s) {
                    continue;
                }
                for k in 0..3 {
                    let c = PathClass {
                        end: mt.slot_vertex(s),
                        k,
                    };
                    assert!(seen.insert((c.end.vertex, mt.class_weight(&w, &c).unwrap())));
                }
            }
        }
    }

    /// `(p, q, r)` maps to the class of `x^p y^q z^r`.
    #[test]
    fn c3_monomial_model() {
        let (t, m) = c3_with_z();
        let mt = mu_table(&t, &m, 0, 8).unwrap();
        let class = |p: i32, q: i32, r: i32| {
            let end = (p - r, q - r);
            let mu = mt.mu(&CoverVertex::new(0, end)).unwrap() as i32;
            PathClass::new(0, end, (r - mu) as u32)
        };
        let mut seen = HashSet::new();
        for p in 0..4 {
            for q in 0..4 {
                for r in 0..4 {
                    let c = class(p, q, r);
                    assert!(seen.insert(c));
                    let kids: BTreeSet<PathClass> =
                        mt.class_children(&c).unwrap().into_iter().map(|x| x.1).collect();
                    let want = BTreeSet::from([class(p + 1, q, r), class(p, q + 1, r), class(p, q, r + 1)]);
                    assert_eq!(kids, want);
                }
            }
        }
    }

    #[test]
    fn canonical_matching_properties() {
        let (t, m) = c3_with_z();
        let mt = mu_table(&t, &m, 0, 6).unwrap();
        assert_eq!(
            mt.in_canonical(&CoverArrow {
                arrow: 0,
                cell: (-1, 0)
            }),
            Some(true)
        );
        for t in builtins() {
            let ms = perfect_matchings(&t);
            let tables: Vec<MuTable> = ms.iter().map(|m| mu_table(&t, m, 0, 5).unwrap()).collect();
            let i0 = tables[0].canonical_matching().unwrap();
            for mt in &tables[1..] {
                assert_eq!(mt.canonical_matching().unwrap(), i0);
            }
            let set: HashSet<CoverArrow> = i0.into_iter().collect();
            let mt = &tables[0];
            // Every face lift inside the trusted region meets I0 exactly once.
            for f in &t.faces {
                for x in -2..=2 {
                    for y in -2..=2 {
                        let mut cell = (x, y);
                        let mut hits = 0;
                        for &a in &f.cycle {
                            if set.contains(&CoverArrow { arrow: a, cell }) {
                                hits += 1;
                            }
                            cell.0 += t.arrows[a].shift.0;
                            cell.1 += t.arrows[a].shift.1;
                        }
                        assert_eq!(hits, 1, "face {f:?} at {x},{y}");
                        assert!(mt.trusted_radius >= 3);
                    }
                }
            }
        }
    }

    #[test]
    fn omega_has_degree_one_for_every_matching() {
        for t in builtins() {
            for m in perfect_matchings(&t) {
                for f in 0..t.faces.len() {
                    assert_eq!(m.degree(&t.face_boundary(f)), 1);
                }
            }
        }
    }

    #[test]
    fn grades_increase_along_arrows() {
        for t in builtins() {
            let mt = mu_table(&t, &reference_matching(&t).unwrap(), 0, 4).unwrap();
            for s in 0..mt.slot_count() {
                if !mt.is_trusted(s) {
                    continue;
                }
                for k in 0..2 {
                    let g = mt.class_grade(s, k);
                    for &(a, tg) in mt.out_edges(s) {
                        let tg = tg as usize;
                        assert!(mt.class_grade(tg, mt.child_k(s, k, a, tg)) > g);
                    }
                }
            }
        }
    }

    #[test]
    fn dump_format() {
        let (t, m) = c3_with_z();
        let mt = mu_table(&t, &m, 0, 1).unwrap();
        let d = mt.dump();
        assert!(d.starts_with("# vertex dx dy mu\n"));
        assert!(d.contains("\n0 -1 -1 1\n"));
        assert!(d.contains("\n0 0 0 0\n"));
    }
}
