//! Brane tilings presented as a quiver on the torus.
//!
//! A tiling is given by its dual quiver: vertices, arrows carrying an integer
//! shift in the fundamental-domain lattice, and oriented faces. Faces with
//! sign `+` correspond to white nodes of the bipartite graph, faces with
//! sign `-` to black ones.

mod builtins;
mod lattice;
mod parse;

use std::fmt;

use crate::error::{Error, Result};

pub use builtins::{builtin_names, builtin_tiling};
pub use lattice::{
    positivity_certificate, smith_normal_form, weight_lattice, PositivityCertificate, Smith,
    WeightLattice,
};
pub use parse::parse_tiling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub shift: (i32, i32),
}

/// An oriented face; `cycle` holds arrow indices in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub sign: Sign,
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingSpec {
    pub vertex_count: usize,
    pub arrows: Vec<Arrow>,
    pub faces: Vec<Face>,
}

/// One term `sign * necklace` of the potential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialTerm {
    pub sign: Sign,
    pub necklace: Vec<String>,
}

impl fmt::Display for PotentialTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.sign, self.necklace.join(" "))
    }
}

/// Dimension vector in `N^{Q_0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// Key for the `(total degree, lexicographic)` output order.
    pub fn graded_key(&self) -> (u64, &[u32]) {
        (self.total(), &self.0)
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(">")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.invariant, self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, invariant: &'static str, witness: String) {
        self.violations.push(Violation { invariant, witness });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ok: {}", self.ok())?;
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

impl TilingSpec {
    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count,
            })
        }
    }

    /// Arrows leaving `v`, in declaration order.
    pub fn out_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.src == v)
            .map(|(i, _)| i)
    }

    /// Arrows entering `v`, in declaration order.
    pub fn in_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.dst == v)
            .map(|(i, _)| i)
    }

    /// `d_2(F)` as a vector in `Z^{Q_1}`.
    pub fn face_boundary(&self, face: usize) -> Vec<i64> {
        let mut v = vec![0; self.arrows.len()];
        for &a in &self.faces[face].cycle {
            v[a] += 1;
        }
        v
    }

    /// Serializes back into the line format accepted by [`parse_tiling`].
    pub fn to_text(&self) -> String {
        let mut s = format!("vertices {}\n", self.vertex_count);
        for a in &self.arrows {
            s += &format!(
                "arrow {} {} {} {} {}\n",
                a.name, a.src, a.dst, a.shift.0, a.shift.1
            );
        }
        for f in &self.faces {
            let names: Vec<&str> = f.cycle.iter().map(|&a| self.arrows[a].name.as_str()).collect();
            s += &format!("face {} {}\n", f.sign, names.join(" "));
        }
        s
    }
}

/// Checks the combinatorial invariants of a torus tiling.
///
/// Besides the face, orientation, Euler characteristic and connectivity
/// conditions, two checks make sure the shifts describe the universal cover:
/// every vertex link is a single cycle (the faces glue to a surface) and the
/// shifts of a cycle basis generate `Z^2` (the shift map identifies the
/// surface's first homology with the lattice of translations).
pub fn validate_tiling(t: &TilingSpec) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = t.vertex_count;
    if n == 0 {
        r.push("vertex count", "tiling has no vertices".into());
        return r;
    }

    let mut plus = vec![0usize; t.arrows.len()];
    let mut minus = vec![0usize; t.arrows.len()];
    for f in &t.faces {
        for &a in &f.cycle {
            match f.sign {
                Sign::Plus => plus[a] += 1,
                Sign::Minus => minus[a] += 1,
            }
        }
    }
    let mut occurrence_ok = true;
    for (i, a) in t.arrows.iter().enumerate() {
        if plus[i] != 1 {
            occurrence_ok = false;
            r.push(
                "face occurrence",
                format!("arrow {} not in exactly one +1 face", a.name),
            );
        }
        if minus[i] != 1 {
            occurrence_ok = false;
            r.push(
                "face occurrence",
                format!("arrow {} not in exactly one -1 face", a.name),
            );
        }
    }

    let mut compose_ok = true;
    for (fi, f) in t.faces.iter().enumerate() {
        let len = f.cycle.len();
        let mut sx = 0i64;
        let mut sy = 0i64;
        for k in 0..len {
            let a = &t.arrows[f.cycle[k]];
            let b = &t.arrows[f.cycle[(k + 1) % len]];
            if a.dst != b.src {
                compose_ok = false;
                r.push(
                    "face composition",
                    format!("face {fi}: arrows {} and {} do not compose", a.name, b.name),
                );
            }
            sx += a.shift.0 as i64;
            sy += a.shift.1 as i64;
        }
        if (sx, sy) != (0, 0) {
            r.push(
                "face contractible",
                format!("face {fi}: shift sum ({sx},{sy}) is not zero"),
            );
        }
    }

    let euler = n as i64 - t.arrows.len() as i64 + t.faces.len() as i64;
    if euler != 0 {
        r.push(
            "euler characteristic",
            format!(
                "{} - {} + {} = {euler}, expected 0",
                n,
                t.arrows.len(),
                t.faces.len()
            ),
        );
    }

    // Undirected spanning tree from vertex 0, recording lattice positions.
    let mut pos: Vec<Option<(i64, i64)>> = vec![None; n];
    let mut tree = vec![false; t.arrows.len()];
    pos[0] = Some((0, 0));
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let pv = pos[v].unwrap();
        for (i, a) in t.arrows.iter().enumerate() {
            let (sx, sy) = (a.shift.0 as i64, a.shift.1 as i64);
            if a.src == v && pos[a.dst].is_none() {
                pos[a.dst] = Some((pv.0 + sx, pv.1 + sy));
                tree[i] = true;
                stack.push(a.dst);
            } else if a.dst == v && pos[a.src].is_none() {
                pos[a.src] = Some((pv.0 - sx, pv.1 - sy));
                tree[i] = true;
                stack.push(a.src);
            }
        }
    }
    let connected = pos.iter().all(Option::is_some);
    for (v, p) in pos.iter().enumerate() {
        if p.is_none() {
            r.push("connected", format!("vertex {v} not connected to vertex 0"));
        }
    }

    if occurrence_ok && compose_ok {
        for (v, cycles) in vertex_link_cycles(t).into_iter().enumerate() {
            if cycles != 1 {
                r.push(
                    "vertex link",
                    format!("vertex {v}: faces around it form {cycles} cycles, expected 1"),
                );
            }
        }
    }

    if connected {
        let cycles: Vec<(i64, i64)> = t
            .arrows
            .iter()
            .enumerate()
            .filter(|(i, _)| !tree[*i])
            .map(|(_, a)| {
                let ps = pos[a.src].unwrap();
                let pd = pos[a.dst].unwrap();
                (
                    ps.0 + a.shift.0 as i64 - pd.0,
                    ps.1 + a.shift.1 as i64 - pd.1,
                )
            })
            .collect();
        let mut g = 0i64;
        for i in 0..cycles.len() {
            for j in i + 1..cycles.len() {
                let det = cycles[i].0 * cycles[j].1 - cycles[i].1 * cycles[j].0;
                g = num_integer::gcd(g, det);
            }
        }
        if g != 1 {
            r.push(
                "shift homology",
                format!("cycle shifts generate a sublattice of index {g} in Z^2 (0 = rank < 2)"),
            );
        }
    }
    r
}

/// Number of cycles formed by face corners around each vertex.
fn vertex_link_cycles(t: &TilingSpec) -> Vec<usize> {
    // Arrow ends: 2*a is the tail of arrow a, 2*a+1 its head.
    let m = t.arrows.len();
    let mut parent: Vec<usize> = (0..2 * m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for f in &t.faces {
        let len = f.cycle.len();
        for k in 0..len {
            let a = f.cycle[k];
            let b = f.cycle[(k + 1) % len];
            let (x, y) = (find(&mut parent, 2 * a + 1), find(&mut parent, 2 * b));
            parent[x] = y;
        }
    }
    let mut roots: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); t.vertex_count];
    for (i, a) in t.arrows.iter().enumerate() {
        let r = find(&mut parent, 2 * i);
        roots[a.src].insert(r);
        let r = find(&mut parent, 2 * i + 1);
        roots[a.dst].insert(r);
    }
    roots.into_iter().map(|s| s.len()).collect()
}

/// One potential term per face, each necklace rotated to its
/// lexicographically smallest arrow-name sequence.
pub fn potential_terms(t: &TilingSpec) -> Vec<PotentialTerm> {
    t.faces
        .iter()
        .map(|f| {
            let names: Vec<&str> = f.cycle.iter().map(|&a| t.arrows[a].name.as_str()).collect();
            let best = (0..names.len())
                .map(|r| {
                    names[r..]
                        .iter()
                        .chain(names[..r].iter())
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                })
                .min()
                .unwrap_or_default();
            PotentialTerm {
                sign: f.sign,
                necklace: best,
            }
        })
        .collect()
}

/// Ringel form `sum_i a_i b_i - sum_{arrows i->j} a_i b_j`.
pub fn ringel_form(t: &TilingSpec, a: &DimVector, b: &DimVector) -> Result<i64> {
    for v in [a, b] {
        if v.len() != t.vertex_count {
            return Err(Error::DimensionMismatch {
                expected: t.vertex_count,
                got: v.len(),
            });
        }
    }
    let diag: i64 = a.0.iter().zip(&b.0).map(|(&x, &y)| x as i64 * y as i64).sum();
    let off: i64 = t
        .arrows
        .iter()
        .map(|ar| a.0[ar.src] as i64 * b.0[ar.dst] as i64)
        .sum();
    Ok(diag - off)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c3_validates() {
        let t = builtin_tiling("c3", None).unwrap();
        assert!(validate_tiling(&t).ok());
        let total: usize = t.faces.iter().map(|f| f.cycle.len()).sum();
        assert_eq!(total, 2 * t.arrows.len());
    }

    #[test]
    fn missing_minus_face_is_reported() {
        let mut t = builtin_tiling("c3", None).unwrap();
        t.faces.retain(|f| f.sign == Sign::Plus);
        let r = validate_tiling(&t);
        assert!(!r.ok());
        assert!(r
            .violations
            .iter()
            .any(|v| v.witness == "arrow x not in exactly one -1 face"));
    }

    #[test]
    fn zero_shifts_fail_homology() {
        let mut t = builtin_tiling("c3", None).unwrap();
        for a in &mut t.arrows {
            a.shift = (0, 0);
        }
        let r = validate_tiling(&t);
        assert!(r.violations.iter().any(|v| v.invariant == "shift homology"));
    }

    #[test]
    fn doubled_shifts_fail_homology() {
        let mut t = builtin_tiling("c3", None).unwrap();
        for a in &mut t.arrows {
            a.shift = (2 * a.shift.0, 2 * a.shift.1);
        }
        let r = validate_tiling(&t);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].witness.contains("index 4"));
    }

    #[test]
    fn disconnected_quiver_reported() {
        let t = parse_tiling(
            "vertices 2\narrow x 0 0 1 0\narrow y 0 0 0 1\narrow z 0 0 -1 -1\n\
             face + x y z\nface - x z y\n",
        )
        .unwrap();
        let r = validate_tiling(&t);
        assert!(r.violations.iter().any(|v| v.invariant == "connected"));
        assert!(r.violations.iter().any(|v| v.invariant == "euler characteristic"));
    }

    #[test]
    fn broken_composition_reported() {
        let mut t = builtin_tiling("conifold", None).unwrap();
        t.faces[0].cycle.swap(0, 1);
        let r = validate_tiling(&t);
        assert!(r.violations.iter().any(|v| v.invariant == "face composition"));
    }

    #[test]
    fn potential_c3() {
        let t = builtin_tiling("c3", None).unwrap();
        let w: Vec<String> = potential_terms(&t).iter().map(|p| p.to_string()).collect();
        assert_eq!(w, vec!["+ x y z", "- x z y"]);
    }

    #[test]
    fn potential_conifold_shares_arrows() {
        let t = builtin_tiling("conifold", None).unwrap();
        let w = potential_terms(&t);
        assert_eq!(w.len(), 2);
        assert_ne!(w[0].sign, w[1].sign);
        let mut a = w[0].necklace.clone();
        let mut b = w[1].necklace.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(a, vec!["x0", "x1", "y0", "y1"]);
    }

    #[test]
    fn potential_spp_triangles_contain_loop() {
        let t = builtin_tiling("spp", None).unwrap();
        let w = potential_terms(&t);
        assert_eq!(w.len(), 4);
        for term in w.iter().filter(|p| p.necklace.len() == 3) {
            assert!(term.necklace.contains(&"x11".to_string()));
        }
    }

    #[test]
    fn ringel_examples() {
        let c3 = builtin_tiling("c3", None).unwrap();
        for n in 0..5u32 {
            let a = DimVector(vec![n]);
            assert_eq!(ringel_form(&c3, &a, &a).unwrap(), -2 * (n as i64).pow(2));
        }
        let con = builtin_tiling("conifold", None).unwrap();
        let one = DimVector(vec![1, 1]);
        assert_eq!(ringel_form(&con, &one, &one).unwrap(), -2);
        let spp = builtin_tiling("spp", None).unwrap();
        let e1 = DimVector::unit(3, 1);
        assert_eq!(ringel_form(&spp, &e1, &e1).unwrap(), 0);
        assert!(ringel_form(&spp, &one, &e1).is_err());
    }

    #[test]
    fn text_roundtrip() {
        for name in ["c3", "conifold", "spp", "dp3"] {
            let t = builtin_tiling(name, None).unwrap();
            assert_eq!(parse_tiling(&t.to_text()).unwrap(), t);
        }
    }
}
