//! Finite order ideals of the path poset and the partition functions they
//! generate.
//!
//! Enumeration is a depth-first search over a fixed linear extension of the
//! poset: an ideal is built by adding its elements in increasing order, so
//! each ideal has exactly one such build sequence. The linear extension sorts
//! classes by a positive grade (strictly increasing along arrows), then by
//! quiver vertex, cell and `k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cover::{default_radius, stable_mu_table, MuTable, PathClass};
use crate::error::{Error, Result};
use crate::matching::reference_matching;
use crate::lp::Q;
use crate::model::{ringel_form, DimVector, TilingSpec};
use crate::series::TruncatedSeries;

const NONE: u32 = u32::MAX;

/// A finite down-closed set of path classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    /// Sorted.
    pub elements: Vec<PathClass>,
    pub dim_vector: DimVector,
}

impl Ideal {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn from_elements(n: usize, mut elements: Vec<PathClass>) -> Self {
        elements.sort();
        let mut dim = vec![0; n];
        for c in &elements {
            dim[c.end.vertex] += 1;
        }
        Ideal {
            elements,
            dim_vector: DimVector(dim),
        }
    }

    /// Checks down-closure against the table's predecessor relation.
    pub fn is_closed(&self, mt: &MuTable) -> Result<bool> {
        let set: std::collections::HashSet<&PathClass> = self.elements.iter().collect();
        for c in &self.elements {
            for (_, p) in mt.class_predecessors(c)? {
                if !set.contains(&p) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Coefficients of a partition function indexed by dimension vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesByDim {
    pub vertex: usize,
    pub max_size: u32,
    pub signed: bool,
    /// Set when a resource guard stopped the enumeration early; the counts
    /// are then lower bounds only.
    pub partial: bool,
    pub coefficients: BTreeMap<DimVector, i128>,
}

impl SeriesByDim {
    pub fn new(vertex: usize, max_size: u32) -> Self {
        SeriesByDim {
            vertex,
            max_size,
            signed: false,
            partial: false,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn get(&self, a: &DimVector) -> i128 {
        self.coefficients.get(a).copied().unwrap_or(0)
    }

    pub fn add(&mut self, a: DimVector, c: i128) {
        *self.coefficients.entry(a).or_insert(0) += c;
    }

    /// Entries in `(total degree, lexicographic)` order.
    pub fn sorted(&self) -> Vec<(&DimVector, i128)> {
        let mut v: Vec<(&DimVector, i128)> = self.coefficients.iter().map(|(a, &c)| (a, c)).collect();
        v.sort_by(|x, y| x.0.graded_key().cmp(&y.0.graded_key()));
        v
    }

    /// Sum of coefficients of each total degree `0..=max_size`.
    pub fn by_size(&self) -> Vec<i128> {
        let mut out = vec![0; self.max_size as usize + 1];
        for (a, &c) in &self.coefficients {
            if let Some(slot) = out.get_mut(a.total() as usize) {
                *slot += c;
            }
        }
        out
    }

    /// The counts as a series in one variable per quiver vertex, truncated
    /// at total degree `trunc`.
    pub fn to_series(&self, num_vars: usize, trunc: u32) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(num_vars, trunc);
        for (a, &c) in &self.coefficients {
            s.add_term(a.0.clone(), Q::from_integer(c.into()));
        }
        s
    }

    pub fn header(&self) -> String {
        format!(
            "# vertex={} max_size={} signed={}",
            self.vertex, self.max_size, self.signed
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        if self.partial {
            s += "# partial: resource limit reached, counts are incomplete\n";
        }
        for (a, c) in self.sorted() {
            let _ = writeln!(s, "alpha={a} count={c}");
        }
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        if self.partial {
            s += "# partial: resource limit reached, counts are incomplete\n";
        }
        for (a, c) in self.sorted() {
            let entries: Vec<String> = a.0.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}\t{c}", entries.join(","));
        }
        s
    }

    /// Parses the output of [`SeriesByDim::to_text`].
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Syntax {
            line,
            msg: msg.to_string(),
        };
        let mut out = SeriesByDim::new(0, 0);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(h) = line.strip_prefix("# ") {
                if h.starts_with("partial") {
                    out.partial = true;
                    continue;
                }
                for field in h.split_whitespace() {
                    let (k, v) = field.split_once('=').ok_or_else(|| bad(line_no, "bad header"))?;
                    match k {
                        "vertex" => out.vertex = v.parse().map_err(|_| bad(line_no, "bad vertex"))?,
                        "max_size" => out.max_size = v.parse().map_err(|_| bad(line_no, "bad max_size"))?,
                        "signed" => out.signed = v.parse().map_err(|_| bad(line_no, "bad signed flag"))?,
                        _ => return Err(bad(line_no, "unknown header field")),
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("alpha=<")
                .ok_or_else(|| bad(line_no, "expected alpha=<...>"))?;
            let (alpha, count) = rest
                .split_once("> count=")
                .ok_or_else(|| bad(line_no, "expected count="))?;
            let entries = if alpha.is_empty() {
                Vec::new()
            } else {
                alpha
                    .split(',')
                    .map(|x| x.parse::<u32>().map_err(|_| bad(line_no, "bad alpha entry")))
                    .collect::<Result<Vec<_>>>()?
            };
            let c: i128 = count.parse().map_err(|_| bad(line_no, "bad count"))?;
            out.add(DimVector(entries), c);
        }
        Ok(out)
    }
}

/// Resource guards and parallelism for the enumeration.
#[derive(Debug, Clone)]
pub struct EnumOptions {
    pub max_size: u32,
    /// Window radius; defaults to `max_size + 2` (scaled by the largest
    /// shift).
    pub radius: Option<u32>,
    pub threads: usize,
    pub max_ideals: Option<u64>,
    pub time_budget: Option<Duration>,
}

impl EnumOptions {
    pub fn new(max_size: u32) -> Self {
        EnumOptions {
            max_size,
            radius: None,
            threads: 1,
            max_ideals: None,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Elem {
    grade: i64,
    tie: u32,
    k: u32,
    slot: u32,
}

struct Ctx<'a> {
    mt: &'a MuTable,
    /// Rank of each slot in `(vertex, dx, dy)` order.
    tie: Vec<u32>,
    max_size: usize,
}

impl<'a> Ctx<'a> {
    fn new(mt: &'a MuTable, max_size: u32) -> Self {
        let count = mt.slot_count();
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&s| {
            let v = mt.slot_vertex(s);
            (v.vertex, v.cell.0, v.cell.1)
        });
        let mut tie = vec![0; count];
        for (rank, s) in order.into_iter().enumerate() {
            tie[s] = rank as u32;
        }
        Ctx {
            mt,
            tie,
            max_size: max_size as usize,
        }
    }

    fn elem(&self, slot: usize, k: u32) -> Elem {
        Elem {
            grade: self.mt.class_grade(slot, k),
            tie: self.tie[slot],
            k,
            slot: slot as u32,
        }
    }

    fn root(&self) -> Elem {
        let s = self
            .mt
            .slot_of_vertex(&self.mt.base)
            .expect("base lies in the window");
        self.elem(s, 0)
    }

    fn class(&self, e: &Elem) -> PathClass {
        PathClass {
            end: self.mt.slot_vertex(e.slot as usize),
            k: e.k,
        }
    }
}

/// Mutable DFS state: `(s, k)` is in the ideal iff `k < h[s]`.
struct State {
    h: Vec<u32>,
    added: Vec<Elem>,
    dim: Vec<u32>,
}

impl State {
    fn new(ctx: &Ctx) -> Self {
        State {
            h: vec![0; ctx.mt.slot_count()],
            added: Vec::new(),
            dim: vec![0; ctx.mt.tiling.vertex_count],
        }
    }

    fn push(&mut self, ctx: &Ctx, e: Elem) {
        debug_assert_eq!(self.h[e.slot as usize], e.k);
        self.h[e.slot as usize] += 1;
        self.dim[ctx.mt.slot_vertex(e.slot as usize).vertex] += 1;
        self.added.push(e);
    }

    fn pop(&mut self, ctx: &Ctx) {
        let e = self.added.pop().expect("nonempty");
        self.h[e.slot as usize] -= 1;
        self.dim[ctx.mt.slot_vertex(e.slot as usize).vertex] -= 1;
    }

    /// Candidates after adding `c`: the later part of the old list merged
    /// with the children of `c` that just became addable.
    fn next_candidates(&self, ctx: &Ctx, rest: &[Elem], c: Elem) -> Result<Vec<Elem>> {
        let mt = ctx.mt;
        let s = c.slot as usize;
        let mut fresh: Vec<Elem> = Vec::new();
        for &(a, t) in mt.out_edges(s) {
            if t == NONE || !mt.is_trusted(t as usize) {
                return Err(mt.exhausted(format!(
                    "ideal reaches {} (enlarge the radius)",
                    mt.slot_vertex(s)
                )));
            }
            let t = t as usize;
            let k = mt.child_k(s, c.k, a, t);
            if k != self.h[t] {
                continue;
            }
            let addable = mt.in_edges(t).iter().all(|&(b, p)| {
                p != NONE
                    && match mt.pred_k(t, k, b, p as usize) {
                        Some(pk) => pk < self.h[p as usize],
                        None => true,
                    }
            });
            if addable {
                fresh.push(ctx.elem(t, k));
            }
        }
        fresh.sort();
        fresh.dedup();
        let mut out = Vec::with_capacity(rest.len() + fresh.len());
        let (mut i, mut j) = (0, 0);
        while i < rest.len() || j < fresh.len() {
            if j == fresh.len() || (i < rest.len() && rest[i] < fresh[j]) {
                out.push(rest[i]);
                i += 1;
            } else {
                out.push(fresh[j]);
                j += 1;
            }
        }
        Ok(out)
    }
}

/// Visits every ideal reachable from the current state by adding elements of
/// `cands` in increasing order. The visitor returns `false` to abort.
fn explore<V: FnMut(&State) -> bool>(
    ctx: &Ctx,
    st: &mut State,
    cands: &[Elem],
    visit: &mut V,
) -> Result<bool> {
    if st.added.len() >= ctx.max_size {
        return Ok(true);
    }
    for (i, &c) in cands.iter().enumerate() {
        st.push(ctx, c);
        let go_on = visit(st)
            && if st.added.len() < ctx.max_size {
                let next = st.next_candidates(ctx, &cands[i + 1..], c)?;
                explore(ctx, st, &next, visit)?
            } else {
                true
            };
        st.pop(ctx);
        if !go_on {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Calls `f` on every ideal of size at most `max_size`, in DFS order.
pub fn for_each_ideal(mt: &MuTable, max_size: u32, mut f: impl FnMut(&Ideal)) -> Result<()> {
    let ctx = Ctx::new(mt, max_size);
    let mut st = State::new(&ctx);
    let n = mt.tiling.vertex_count;
    let mut emit = |st: &State| {
        let elements = st.added.iter().map(|e| ctx.class(e)).collect();
        f(&Ideal::from_elements(n, elements));
        true
    };
    emit(&st);
    explore(&ctx, &mut st, &[ctx.root()], &mut emit)?;
    Ok(())
}

/// All ideals of size at most `max_size`; `mt` should have radius at least
/// `max_size + 2`.
pub fn enumerate_ideals(mt: &MuTable, max_size: u32) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    for_each_ideal(mt, max_size, |i| out.push(i.clone()))?;
    Ok(out)
}

struct Guard {
    count: AtomicU64,
    stop: AtomicBool,
    start: Instant,
    max_ideals: Option<u64>,
    budget: Option<Duration>,
}

impl Guard {
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let c = self.count.fetch_add(1, Ordering::Relaxed) + 1;
        let over_count = self.max_ideals.is_some_and(|m| c > m);
        let over_time = c.is_multiple_of(1024) && self.budget.is_some_and(|b| self.start.elapsed() > b);
        if over_count || over_time {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

type Counts = HashMap<Vec<u32>, i128>;

fn count_into(counts: &mut Counts, dim: &[u32]) {
    if let Some(c) = counts.get_mut(dim) {
        *c += 1;
    } else {
        counts.insert(dim.to_vec(), 1);
    }
}

/// Counts ideals by dimension vector; parallel over DFS subtrees when
/// `threads > 1`. The result does not depend on the thread count.
pub fn count_ideals(mt: &MuTable, opts: &EnumOptions) -> Result<SeriesByDim> {
    let ctx = Ctx::new(mt, opts.max_size);
    let guard = Guard {
        count: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        start: Instant::now(),
        max_ideals: opts.max_ideals,
        budget: opts.time_budget,
    };
    let mut counts = Counts::new();
    let root = ctx.root();

    // Expand the top of the tree breadth-first into independent tasks.
    let mut st = State::new(&ctx);
    count_into(&mut counts, &st.dim);
    guard.tick();
    let mut tasks: Vec<(Vec<Elem>, Vec<Elem>)> = vec![(Vec::new(), vec![root])];
    let want = if opts.threads > 1 { 16 * opts.threads } else { 1 };
    let mut depth = 0;
    while tasks.len() < want && depth < ctx.max_size && depth < 6 {
        let mut next = Vec::new();
        for (added, cands) in &tasks {
            for e in added {
                st.push(&ctx, *e);
            }
            for (i, &c) in cands.iter().enumerate() {
                st.push(&ctx, c);
                count_into(&mut counts, &st.dim);
                guard.tick();
                let nc = if st.added.len() < ctx.max_size {
                    st.next_candidates(&ctx, &cands[i + 1..], c)?
                } else {
                    Vec::new()
                };
                if !nc.is_empty() {
                    next.push((st.added.clone(), nc));
                }
                st.pop(&ctx);
            }
            for _ in added {
                st.pop(&ctx);
            }
        }
        tasks = next;
        depth += 1;
    }

    let run = |(added, cands): &(Vec<Elem>, Vec<Elem>)| -> Result<Counts> {
        let mut local = Counts::new();
        let mut st = State::new(&ctx);
        for e in added {
            st.push(&ctx, *e);
        }
        let mut visit = |s: &State| {
            count_into(&mut local, &s.dim);
            guard.tick()
        };
        explore(&ctx, &mut st, cands, &mut visit)?;
        Ok(local)
    };
    let partials: Vec<Result<Counts>> = if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    } else {
        tasks.iter().map(run).collect()
    };
    for p in partials {
        for (dim, c) in p? {
            *counts.entry(dim).or_insert(0) += c;
        }
    }

    let mut out = SeriesByDim::new(mt.base.vertex, opts.max_size);
    out.partial = guard.stop.load(Ordering::Relaxed);
    for (dim, c) in counts {
        out.add(DimVector(dim), c);
    }
    Ok(out)
}

/// Stabilized table over the reference matching, sized for `max_size`.
pub fn table_for(t: &TilingSpec, base_vertex: usize, max_size: u32, radius: Option<u32>) -> Result<MuTable> {
    let m0 = reference_matching(t)?;
    let r = radius.unwrap_or_else(|| default_radius(t, max_size));
    stable_mu_table(t, &m0, base_vertex, r, 6)
}

/// Builds a table and counts; on window exhaustion the radius grows and the
/// count is retried.
pub fn partition_function_with(t: &TilingSpec, base_vertex: usize, opts: &EnumOptions) -> Result<SeriesByDim> {
    t.check_vertex(base_vertex)?;
    let mut radius = opts.radius.unwrap_or_else(|| default_radius(t, opts.max_size));
    let mut last = None;
    for _ in 0..3 {
        let mt = table_for(t, base_vertex, opts.max_size, Some(radius))?;
        match count_ideals(&mt, opts) {
            Err(e @ Error::WindowExhausted { .. }) => {
                last = Some(e);
                radius += opts.max_size.max(2);
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Ideal counts by dimension vector, complete through total size `max_size`.
pub fn partition_function(t: &TilingSpec, base_vertex: usize, max_size: u32) -> Result<SeriesByDim> {
    partition_function_with(t, base_vertex, &EnumOptions::new(max_size))
}

/// `(-1)^(a_base + <a, a>)`.
pub fn dt_sign(t: &TilingSpec, base_vertex: usize, a: &DimVector) -> Result<i64> {
    t.check_vertex(base_vertex)?;
    let r = ringel_form(t, a, a)?;
    let e = a.0[base_vertex] as i64 + r;
    Ok(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Multiplies every coefficient by its DT sign.
pub fn apply_dt_signs(t: &TilingSpec, z: &SeriesByDim) -> Result<SeriesByDim> {
    let mut out = z.clone();
    out.signed = true;
    for (a, c) in out.coefficients.iter_mut() {
        *c *= dt_sign(t, z.vertex, a)? as i128;
    }
    Ok(out)
}

pub fn dt_partition_function(t: &TilingSpec, base_vertex: usize, max_size: u32) -> Result<SeriesByDim> {
    apply_dt_signs(t, &partition_function(t, base_vertex, max_size)?)
}
