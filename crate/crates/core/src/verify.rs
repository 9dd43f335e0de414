//! Consistency certification: non-degeneracy, freeness of the weight lattice,
//! an R-charge, a bounded direct search for the shortest-path extension
//! condition, and a numerical check of the graded resolution of each simple
//! module.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;

use crate::cover::{default_radius, stable_mu_table, CoverVertex, PathClass};
use crate::error::{Error, Result};
use crate::lp::Q;
use crate::matching::{is_non_degenerate, perfect_matchings, r_charge, reference_matching, Matching};
use crate::model::{positivity_certificate, weight_lattice, PositivityCertificate, TilingSpec, WeightLattice};

/// Default number of search states before the extension search gives up.
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

/// Outcome of the bounded search for shortest paths that cannot be
/// extended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCReport {
    /// Largest matching degree allowed for a candidate path.
    pub cycle_bound: u32,
    pub paths_checked: usize,
    /// Shortest paths with no shortest extension at one of their ends.
    pub violations: Vec<String>,
    /// Paths where "avoids some matching" and "zero omega-exponent in the
    /// shortest-path table" disagree.
    pub criterion_mismatches: Vec<String>,
    /// Frontier size when the state budget ran out.
    pub inconclusive: Option<usize>,
}

impl ConditionCReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.criterion_mismatches.is_empty() && self.inconclusive.is_none()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    end: CoverVertex,
    degrees: Vec<u32>,
}

fn extended(degrees: &[u32], ms: &[Matching], arrow: usize) -> Vec<u32> {
    degrees
        .iter()
        .zip(ms)
        .map(|(&d, m)| d + m.indicator[arrow] as u32)
        .collect()
}

fn avoids_some(degrees: &[u32]) -> bool {
    degrees.contains(&0)
}

/// Searches every source vertex for shortest paths (paths avoiding at least
/// one perfect matching) of matching degree at most `cycle_bound`, checking
/// that each extends to a shortest path by an arrow at its head and by an
/// arrow at its tail. `cycle_bound` defaults to the number of perfect
/// matchings. Each candidate is also classified through the shortest-path
/// table and the two answers are compared.
pub fn check_condition_c(t: &TilingSpec, cycle_bound: Option<u32>, max_states: usize) -> Result<ConditionCReport> {
    let ms = perfect_matchings(t);
    if ms.is_empty() {
        return Err(Error::NoMatching);
    }
    let bound = cycle_bound.unwrap_or(ms.len() as u32);
    let mut report = ConditionCReport {
        cycle_bound: bound,
        paths_checked: 0,
        violations: Vec::new(),
        criterion_mismatches: Vec::new(),
        inconclusive: None,
    };
    // Every arrow lies in some matching, so the degrees bound the length.
    let max_len = ms.len() as u32 * bound + 1;
    let m0 = reference_matching(t)?;
    for source in 0..t.vertex_count {
        let mt = stable_mu_table(t, &m0, source, default_radius(t, max_len), 6)?;
        let zero = CoverVertex::new(source, (0, 0));
        let root = State {
            end: zero,
            degrees: vec![0; ms.len()],
        };
        let mut seen: HashMap<State, usize> = HashMap::new();
        let mut nodes: Vec<(State, Option<(usize, usize)>)> = vec![(root.clone(), None)];
        seen.insert(root, 0);
        let mut queue = VecDeque::from([0usize]);
        let describe = |nodes: &[(State, Option<(usize, usize)>)], mut i: usize| {
            let end = nodes[i].0.end;
            let mut names = Vec::new();
            while let Some((p, a)) = nodes[i].1 {
                names.push(t.arrows[a].name.as_str());
                i = p;
            }
            names.reverse();
            let body = if names.is_empty() { "e".to_string() } else { names.join(" ") };
            format!("path [{body}] from {source} to {end}")
        };
        while let Some(i) = queue.pop_front() {
            if nodes.len() > max_states {
                report.inconclusive = Some(queue.len() + 1);
                return Ok(report);
            }
            report.paths_checked += 1;
            let state = nodes[i].0.clone();
            let v = state.end.vertex;
            let mu_zero = |end: &CoverVertex, degrees: &[u32]| {
                mt.mu(end)
                    .filter(|_| mt.is_trusted_vertex(end))
                    .map(|mu| degrees[0] as i64 == mu as i64)
            };
            if let Some(agree) = mu_zero(&state.end, &state.degrees) {
                if !agree {
                    report
                        .criterion_mismatches
                        .push(format!("{} avoids a matching but is not minimal", describe(&nodes, i)));
                }
            }
            let mut head_ok = false;
            for a in t.out_arrows(v) {
                let arrow = &t.arrows[a];
                let end = CoverVertex::new(
                    arrow.dst,
                    (state.end.cell.0 + arrow.shift.0, state.end.cell.1 + arrow.shift.1),
                );
                let degrees = extended(&state.degrees, &ms, a);
                let shortest = avoids_some(&degrees);
                head_ok |= shortest;
                if !shortest {
                    if mu_zero(&end, &degrees) == Some(true) {
                        report.criterion_mismatches.push(format!(
                            "{} then {} meets every matching but is minimal",
                            describe(&nodes, i),
                            arrow.name
                        ));
                    }
                    continue;
                }
                if degrees.iter().any(|&d| d > bound) {
                    continue;
                }
                let next = State { end, degrees };
                if !seen.contains_key(&next) {
                    seen.insert(next.clone(), nodes.len());
                    nodes.push((next, Some((i, a))));
                    queue.push_back(nodes.len() - 1);
                }
            }
            let tail_ok = t
                .in_arrows(source)
                .any(|b| avoids_some(&extended(&state.degrees, &ms, b)));
            if !head_ok {
                report
                    .violations
                    .push(format!("{} has no shortest extension at its head", describe(&nodes, i)));
            }
            if !tail_ok {
                report
                    .violations
                    .push(format!("{} has no shortest extension at its tail", describe(&nodes, i)));
            }
        }
    }
    Ok(report)
}

/// Result of the graded character check at one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionCheck {
    pub vertex: usize,
    pub degree_bound: u32,
    pub weights_checked: usize,
    /// First weight (in increasing degree, then coordinate order) where the
    /// alternating sum is nonzero, with that sum.
    pub failure: Option<(Vec<i64>, i64)>,
}

impl ResolutionCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Weights of all path classes starting at `base` with degree at most
/// `bound`, where degree is measured by `cert`.
fn graded_support(
    t: &TilingSpec,
    w: &WeightLattice,
    cert: &PositivityCertificate,
    base: usize,
    bound: &Q,
) -> Result<HashSet<Vec<i64>>> {
    let min_arrow = w
        .arrow_weight
        .iter()
        .map(|aw| cert.eval(aw))
        .min()
        .expect("tiling has arrows");
    let max_len = (bound / &min_arrow).floor().to_integer();
    let max_len = u32::try_from(max_len).map_err(|_| Error::ResourceLimit("degree bound too large".into()))?;
    let m0 = reference_matching(t)?;
    let mut radius = default_radius(t, max_len + 1);
    for _ in 0..4 {
        let mt = stable_mu_table(t, &m0, base, radius, 6)?;
        let root = PathClass::new(base, (0, 0), 0);
        let mut seen: HashSet<PathClass> = HashSet::from([root]);
        let mut out = HashSet::new();
        let mut stack = vec![(root, vec![0i64; w.lattice_rank])];
        let mut exhausted = false;
        while let Some((c, wt)) = stack.pop() {
            let children = match mt.class_children(&c) {
                Ok(ch) => ch,
                Err(Error::WindowExhausted { .. }) => {
                    exhausted = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            for (a, child) in children {
                let cw: Vec<i64> = wt.iter().zip(&w.arrow_weight[a]).map(|(x, y)| x + y).collect();
                if &cert.eval(&cw) <= bound && seen.insert(child) {
                    stack.push((child, cw));
                }
            }
            out.insert(wt);
        }
        if !exhausted {
            return Ok(out);
        }
        radius *= 2;
    }
    Err(Error::WindowExhausted {
        radius,
        msg: format!("graded support of vertex {base} up to degree {bound}"),
    })
}

fn shifted(x: &[i64], by: &[i64], sign: i64) -> Vec<i64> {
    x.iter().zip(by).map(|(a, b)| a + sign * b).collect()
}

/// Checks that the alternating sum of graded dimensions along the length-3
/// projective resolution of the simple module at `vertex` vanishes at every
/// weight of degree at most `degree_bound`. Paths are graded by the
/// positivity functional normalized so that `omega_bar` has degree 2.
pub fn verify_resolution_character(t: &TilingSpec, vertex: usize, degree_bound: u32) -> Result<ResolutionCheck> {
    t.check_vertex(vertex)?;
    let w = weight_lattice(t)?;
    let cert = positivity_certificate(&w)?;
    let bound = Q::from_integer(degree_bound.into());
    let supports: Vec<HashSet<Vec<i64>>> = (0..t.vertex_count)
        .map(|j| graded_support(t, &w, &cert, j, &bound))
        .collect::<Result<_>>()?;
    let omega = &w.omega_bar;
    let outgoing: Vec<usize> = t.out_arrows(vertex).collect();
    let incoming: Vec<usize> = t.in_arrows(vertex).collect();
    // Shift of the relation term indexed by b: the weight of the derivative
    // of the potential along b.
    let rel_shift: Vec<Vec<i64>> = incoming
        .iter()
        .map(|&b| shifted(omega, &w.arrow_weight[b], -1))
        .collect();

    let mut candidates: HashSet<Vec<i64>> = supports[vertex].clone();
    for &a in &outgoing {
        for s in &supports[t.arrows[a].dst] {
            candidates.insert(shifted(s, &w.arrow_weight[a], 1));
        }
    }
    for (bi, &b) in incoming.iter().enumerate() {
        for s in &supports[t.arrows[b].src] {
            candidates.insert(shifted(s, &rel_shift[bi], 1));
        }
    }
    for s in &supports[vertex] {
        candidates.insert(shifted(s, omega, 1));
    }
    let mut weights: Vec<(Q, Vec<i64>)> = candidates
        .into_iter()
        .map(|l| (cert.eval(&l), l))
        .filter(|(r, _)| r <= &bound)
        .collect();
    weights.sort();

    let dim = |j: usize, l: Vec<i64>| supports[j].contains(&l) as i64;
    let mut failure = None;
    for (_, l) in &weights {
        let mut sum = dim(vertex, l.clone());
        for &a in &outgoing {
            sum -= dim(t.arrows[a].dst, shifted(l, &w.arrow_weight[a], -1));
        }
        for (bi, &b) in incoming.iter().enumerate() {
            sum += dim(t.arrows[b].src, shifted(l, &rel_shift[bi], -1));
        }
        sum -= dim(vertex, shifted(l, omega, -1));
        if l.iter().all(|&x| x == 0) {
            sum -= 1;
        }
        if sum != 0 {
            failure = Some((l.clone(), sum));
            break;
        }
    }
    Ok(ResolutionCheck {
        vertex,
        degree_bound,
        weights_checked: weights.len(),
        failure,
    })
}

/// Aggregated consistency status.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub non_degenerate: bool,
    pub uncovered_arrows: Vec<String>,
    pub lattice_free: bool,
    /// Nontrivial invariant factors, or the error met while computing the
    /// lattice.
    pub lattice_detail: String,
    pub r_charge_feasible: bool,
    pub r_charge_slack: Option<Q>,
    pub condition_c: Option<ConditionCReport>,
}

impl ConsistencyReport {
    /// Non-degeneracy, a free weight lattice and an R-charge together
    /// certify consistency; the direct search is supplementary.
    pub fn certified(&self) -> bool {
        self.non_degenerate && self.lattice_free && self.r_charge_feasible
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "non_degenerate: {}", self.non_degenerate)?;
        if !self.uncovered_arrows.is_empty() {
            writeln!(f, "uncovered_arrows: {}", self.uncovered_arrows.join(","))?;
        }
        writeln!(f, "lattice_free: {}", self.lattice_free)?;
        if !self.lattice_detail.is_empty() {
            writeln!(f, "lattice_detail: {}", self.lattice_detail)?;
        }
        writeln!(f, "r_charge_feasible: {}", self.r_charge_feasible)?;
        if let Some(s) = &self.r_charge_slack {
            writeln!(f, "r_charge_slack: {s}")?;
        }
        match &self.condition_c {
            None => writeln!(f, "condition_c_checked: false")?,
            Some(c) => {
                writeln!(f, "condition_c_checked: true")?;
                writeln!(f, "condition_c_bound: {}", c.cycle_bound)?;
                writeln!(f, "condition_c_paths: {}", c.paths_checked)?;
                if let Some(n) = c.inconclusive {
                    writeln!(f, "condition_c_inconclusive_frontier: {n}")?;
                }
                writeln!(f, "condition_c_violations: {}", c.violations.len())?;
                for v in c.violations.iter().chain(&c.criterion_mismatches) {
                    writeln!(f, "violation: {v}")?;
                }
            }
        }
        writeln!(f, "certified: {}", self.certified())
    }
}

/// Runs the certifying checks; failures are recorded, never raised.
pub fn consistency_report(t: &TilingSpec) -> ConsistencyReport {
    let (non_degenerate, uncovered_arrows) = is_non_degenerate(t);
    let (lattice_free, lattice_detail) = match weight_lattice(t) {
        Ok(_) => (true, String::new()),
        Err(e) => (false, e.to_string()),
    };
    let (r_charge_feasible, r_charge_slack) = match r_charge(t) {
        Ok(r) => (true, Some(r.slack)),
        Err(_) => (false, None),
    };
    ConsistencyReport {
        non_degenerate,
        uncovered_arrows,
        lattice_free,
        lattice_detail,
        r_charge_feasible,
        r_charge_slack: r_charge_slack.filter(|s| !s.is_zero()),
        condition_c: None,
    }
}

/// [`consistency_report`] followed by the direct extension search.
pub fn consistency_report_with_search(t: &TilingSpec, cycle_bound: Option<u32>, max_states: usize) -> ConsistencyReport {
    let mut r = consistency_report(t);
    if r.non_degenerate {
        r.condition_c = check_condition_c(t, cycle_bound, max_states).ok();
    }
    r
}
