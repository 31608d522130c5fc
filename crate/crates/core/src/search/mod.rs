//! Exhaustive generation of incidence matrices around a prescribed facet.
//!
//! The target matrix starts from the base facet `F`: its rows are the
//! restrictions to `F` of the facets meeting `F` in a ridge. Further facets
//! meet `F` in a proper sub-face, so their restrictions are proper subsets of
//! rows of `F`; a multiset of those is appended, followed by the row of `F`
//! itself. New vertices (columns, never on `F`) are then added one at a time.
//! A row is *confirmed* once its extracted facet is an allowed type; a
//! confirmed row takes no further vertices, and the last vertex goes on
//! exactly the unconfirmed rows.

pub mod campaign;
pub mod extend;
pub mod symmetry;

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{canonical_form, canonical_key, CanonicalKey, FacetIndex, IndexError, LookupCache};
use crate::incmat::{
    bit, columns_two_neighborly, extends_two_neighborly, extends_two_neighborly_last, is_subset, low_mask,
    maximal_rows, positions,
    validate, IncidenceMatrix, MAX_WIDTH,
};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid campaign: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// One run of the engine.
#[derive(Debug, Clone)]
pub struct CampaignSpec {
    pub facet_list: Vec<IncidenceMatrix>,
    pub base_facet: IncidenceMatrix,
    pub dim: u32,
    pub vrt: usize,
    pub fct: usize,
    pub minfv: u32,
}

/// At least `d + 3` facets meet at each vertex once the polytope has that
/// many vertices; otherwise only the trivial bound `d` is known.
pub fn default_minfv(dim: u32, vrt: usize) -> u32 {
    if vrt >= dim as usize + 3 {
        dim + 3
    } else {
        dim
    }
}

impl CampaignSpec {
    pub fn check(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidSpec(m));
        if self.dim < 4 {
            return bad(format!("dimension {} is below 4", self.dim));
        }
        if self.vrt <= self.base_facet.cols() {
            return bad(format!(
                "{} vertices do not exceed the base facet's {}",
                self.vrt,
                self.base_facet.cols()
            ));
        }
        if self.fct <= self.base_facet.rows() {
            return bad(format!(
                "{} facets do not exceed the base facet's {}",
                self.fct,
                self.base_facet.rows()
            ));
        }
        if self.vrt > MAX_WIDTH || self.fct > MAX_WIDTH {
            return bad(format!("shape {}x{} exceeds {MAX_WIDTH}", self.fct, self.vrt));
        }
        if self.minfv < self.dim {
            return bad(format!("minfv {} is below the dimension {}", self.minfv, self.dim));
        }
        let base = canonical_key(&self.base_facet);
        if !self.facet_list.iter().any(|m| canonical_key(m) == base) {
            return bad("the base facet is not in the facet list".into());
        }
        Ok(())
    }

    /// Minimum number of a new facet's vertices inside `F`.
    pub fn min_row_ones(&self) -> u32 {
        let outside = self.vrt - self.base_facet.cols();
        (self.dim as usize).saturating_sub(outside) as u32
    }

    /// Size of the multisets of extra rows.
    pub fn extra_rows(&self) -> usize {
        self.fct - self.base_facet.rows() - 1
    }
}

/// Rows of width `cols(F)` with at least `min_ones` ones that are proper
/// subsets of some row of `F`, ascending.
pub fn gen_feasible_rows(f: &IncidenceMatrix, min_ones: u32) -> Vec<u64> {
    let mut out = std::collections::BTreeSet::new();
    for &r in f.row_words() {
        // all proper submasks of r
        let mut s = r;
        loop {
            s = s.wrapping_sub(1) & r;
            if s.count_ones() >= min_ones {
                out.insert(s);
            }
            if s == 0 {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// Candidate new columns for a start matrix whose last row is the base
/// facet: words over the rows with a zero in the last row, at least `minfv`
/// ones, keeping the columns 2-neighborly. Ascending.
pub fn gen_feasible_columns(m: &IncidenceMatrix, minfv: u32) -> Vec<u64> {
    let cols = m.column_words();
    candidate_columns(m.rows(), minfv)
        .into_iter()
        .filter(|&c| extends_two_neighborly(&cols, c))
        .collect()
}

/// Words over `k` rows with the last row clear and at least `minfv` ones.
fn candidate_columns(k: usize, minfv: u32) -> Vec<u64> {
    let free = k - 1;
    let mut out: Vec<u64> = (0u64..1 << free)
        .filter(|w| w.count_ones() >= minfv)
        .map(|w| w << (64 - free))
        .collect();
    out.sort_unstable();
    out
}

/// Resource limits for a run. The clock starts when the run starts.
#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    pub limits: Limits,
    /// Raised externally to request a clean stop at the next check.
    pub stop: Option<Arc<AtomicBool>>,
    /// Multisets handed to the pool at a time; the resume granularity.
    pub chunk: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            workers: 0,
            limits: Limits::default(),
            stop: None,
            chunk: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Multisets of extra rows examined.
    pub subsets: u64,
    /// Start matrices passing the column-count and neighborliness tests.
    pub starts: u64,
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Matrices accepted before deduplication.
    pub accepted: u64,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Self) {
        self.subsets += o.subsets;
        self.starts += o.starts;
        self.nodes += o.nodes;
        self.accepted += o.accepted;
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Canonical forms keyed and sorted by canonical key.
    pub results: BTreeMap<CanonicalKey, IncidenceMatrix>,
    pub stats: Stats,
    /// Index of the first multiset not yet fully processed; equals
    /// `total_subsets` when the run completed.
    pub next_subset: u64,
    pub total_subsets: u64,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        self.next_subset >= self.total_subsets
    }
}

/// All matrices matching a campaign, canonical and sorted by key.
pub fn find_matrices(spec: &CampaignSpec) -> Result<Vec<IncidenceMatrix>, SearchError> {
    let index = FacetIndex::build(&spec.facet_list)?;
    let out = run(spec, &index, &SearchOptions::default(), 0)?;
    Ok(out.results.into_values().collect())
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Non-decreasing index sequences of length `m` over `0..r`, in
/// lexicographic order, starting at position `start`.
struct Multisets {
    r: usize,
    current: Option<Vec<usize>>,
}

impl Multisets {
    fn new(r: usize, m: usize) -> Self {
        let current = if r == 0 && m > 0 { None } else { Some(vec![0; m]) };
        Self { r, current }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        if let Some(i) = (0..next.len()).rev().find(|&i| next[i] + 1 < self.r) {
            let v = next[i] + 1;
            for x in &mut next[i..] {
                *x = v;
            }
            self.current = Some(next);
        }
        Some(cur)
    }
}

struct Shared {
    nodes: AtomicU64,
    abort: AtomicBool,
    start: Instant,
    limits: Limits,
    stop: Option<Arc<AtomicBool>>,
}

impl Shared {
    fn should_stop(&self, local_nodes: u64) -> bool {
        if self.abort.load(Ordering::Relaxed) {
            return true;
        }
        let total = self.nodes.fetch_add(local_nodes, Ordering::Relaxed) + local_nodes;
        let over = self.limits.max_nodes.is_some_and(|n| total > n)
            || self.limits.max_time.is_some_and(|t| self.start.elapsed() > t)
            || self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed));
        if over {
            self.abort.store(true, Ordering::Relaxed);
        }
        over
    }
}

/// Runs the engine over multisets `start_subset..`.
pub fn run(
    spec: &CampaignSpec,
    index: &FacetIndex,
    options: &SearchOptions,
    start_subset: u64,
) -> Result<RunOutcome, SearchError> {
    spec.check()?;
    let feasible_rows = gen_feasible_rows(&spec.base_facet, spec.min_row_ones());
    let m = spec.extra_rows();
    let total_subsets = binomial((feasible_rows.len() + m).saturating_sub(1) as u64, m as u64);
    let total_subsets = if feasible_rows.is_empty() { u64::from(m == 0) } else { total_subsets };
    let candidates = candidate_columns(spec.fct, spec.minfv);
    let widest = spec.facet_list.iter().map(|m| m.cols() as u32).max().unwrap_or(0);
    let deleted: Vec<Option<FacetIndex>> = (0..widest)
        .map(|w| (w > 0 && w + DELETION_DEPTH >= widest).then(|| deletion_index(&spec.facet_list, w as usize)).flatten())
        .collect();
    let autos = symmetry::column_automorphisms(&spec.base_facet);
    let maps = symmetry::index_maps(&autos, &feasible_rows);
    let shared = Shared {
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
        start: Instant::now(),
        limits: options.limits.clone(),
        stop: options.stop.clone(),
    };
    let ctx = Context {
        spec,
        index,
        feasible_rows: &feasible_rows,
        candidates: &candidates,
        widest,
        deleted: &deleted,
        widths: spec.facet_list.iter().fold(0, |w, m| w | 1u128 << m.cols()),
        autos: &autos,
        maps: &maps,
        shared: &shared,
    };

    let pool = if options.workers > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.workers)
                .build()
                .map_err(|e| SearchError::Pool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut results = BTreeMap::new();
    let mut stats = Stats::default();
    let mut next_subset = start_subset.min(total_subsets);
    let mut iter = Multisets::new(feasible_rows.len(), m).skip(next_subset as usize);
    let chunk = options.chunk.max(1);
    loop {
        let batch: Vec<Vec<usize>> = iter.by_ref().take(chunk).collect();
        if batch.is_empty() {
            break;
        }
        let work = || {
            batch
                .par_iter()
                .map(|s| ctx.process(s))
                .reduce(|| (Vec::new(), Stats::default()), |mut a, b| {
                    a.0.extend(b.0);
                    a.1 += b.1;
                    a
                })
        };
        let (found, batch_stats) = match &pool {
            Some(p) => p.install(work),
            None => work(),
        };
        if shared.abort.load(Ordering::Relaxed) {
            break;
        }
        stats += batch_stats;
        for mtx in found {
            let (key, form) = canonical_form(&mtx);
            results.entry(key).or_insert(form);
        }
        next_subset += batch.len() as u64;
    }
    Ok(RunOutcome {
        results,
        stats,
        next_subset,
        total_subsets,
    })
}

/// How far below the widest facet the deletion test reaches.
const DELETION_DEPTH: u32 = 3;

/// Every allowed facet with more than `width` vertices, with all but `width`
/// of its vertices deleted: the maximal rows on the kept columns, one per
/// isomorphism class.
fn deletion_index(facets: &[IncidenceMatrix], width: usize) -> Option<FacetIndex> {
    let mut seen = HashSet::new();
    let mut members = Vec::new();
    for g in facets.iter().filter(|g| g.cols() > width) {
        let n = g.cols();
        for keep in (0u64..1 << n).filter(|k| k.count_ones() as usize == width) {
            let mask = keep << (64 - n);
            let rows = maximal_rows(g.restrict_columns(mask).row_words());
            let m = IncidenceMatrix::new(width, rows).expect("shape within bounds");
            if seen.insert(canonical_key(&m)) {
                members.push(m);
            }
        }
    }
    FacetIndex::build(&members).ok()
}

struct Context<'a> {
    spec: &'a CampaignSpec,
    index: &'a FacetIndex,
    feasible_rows: &'a [u64],
    candidates: &'a [u64],
    /// Vertex count of the largest allowed facet.
    widest: u32,
    /// Entry `w`: allowed facets cut down to `w` vertices, for `w` close
    /// below the widest facet and when the expansion fits the index limits.
    deleted: &'a [Option<FacetIndex>],
    /// Bit `n` set when some allowed facet has `n` vertices.
    widths: u128,
    /// Column automorphisms of the base and their action on `feasible_rows`.
    autos: &'a [Vec<usize>],
    maps: &'a [Vec<usize>],
    shared: &'a Shared,
}

impl Context<'_> {
    /// Vertices the `open` rows can still take. Every later vertex lies on
    /// at least `minfv` open rows, and no row outgrows the widest facet.
    fn room(&self, rows: &[u64], open: u64) -> u32 {
        positions(open).map(|i| self.widest.saturating_sub(rows[i].count_ones())).sum()
    }

    fn process(&self, subset: &[usize]) -> (Vec<IncidenceMatrix>, Stats) {
        let mut stats = Stats {
            subsets: 1,
            ..Stats::default()
        };
        // isomorphic start matrices have isomorphic searches
        if self.shared.abort.load(Ordering::Relaxed) || !symmetry::is_least_in_orbit(subset, self.maps, &mut Vec::new()) {
            return (Vec::new(), stats);
        }
        let f = &self.spec.base_facet;
        let nf = f.cols();
        let mut rows: Vec<u64> = f.row_words().to_vec();
        rows.extend(subset.iter().map(|&i| self.feasible_rows[i]));
        rows.push(low_mask(nf));
        let k = rows.len();
        let cols: Vec<u64> = (0..nf)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .filter(|(_, &r)| r & bit(j) != 0)
                    .fold(0u64, |w, (i, _)| w | bit(i))
            })
            .collect();
        // a row other than the base needs a vertex off the base
        let stuck = rows[..k - 1].iter().any(|r| r.count_ones() >= self.widest);
        let remaining = self.spec.vrt - nf;
        if stuck
            || self.room(&rows, low_mask(k - 1)) < remaining as u32 * self.spec.minfv
            || cols.iter().any(|c| c.count_ones() < self.spec.minfv)
            || !columns_two_neighborly(&cols)
        {
            return (Vec::new(), stats);
        }
        stats.starts = 1;
        let pool: Vec<u64> = self
            .candidates
            .iter()
            .copied()
            .filter(|&c| extends_two_neighborly(&cols, c))
            .collect();
        let mut w = Worker {
            ctx: self,
            k,
            rows,
            cols,
            cache: LookupCache::new(),
            deleted_cache: LookupCache::new(),
            out: Vec::new(),
            nodes: 0,
            unreported: 0,
            pool,
            scratch: Vec::new(),
            kept: Vec::new(),
            base_cols: nf,
            stabilizer: symmetry::start_stabilizer(f, self.autos, self.maps, subset),
            path: Vec::new(),
            seen: HashSet::new(),
        };
        let all: Vec<u32> = (0..w.pool.len() as u32).collect();
        w.add_vertex(remaining, bit(k - 1), &all);
        stats.nodes = w.nodes;
        stats.accepted = w.out.len() as u64;
        self.shared.should_stop(w.unreported);
        (w.out, stats)
    }
}

struct Worker<'a> {
    ctx: &'a Context<'a>,
    k: usize,
    /// Row words over the current columns.
    rows: Vec<u64>,
    /// Column words over the `k` rows.
    cols: Vec<u64>,
    cache: LookupCache,
    deleted_cache: LookupCache,
    out: Vec<IncidenceMatrix>,
    nodes: u64,
    unreported: u64,
    /// Candidate columns of the start matrix. Each node receives the indices
    /// of those still compatible with its columns and confirmed rows.
    pool: Vec<u64>,
    scratch: Vec<u64>,
    kept: Vec<u64>,
    base_cols: usize,
    /// Row permutations fixing the start matrix; the first new column is
    /// only taken as the least member of its orbit.
    stabilizer: Vec<Vec<usize>>,
    /// Pool indices on the current branch, in the order taken.
    path: Vec<u32>,
    /// Branch states already expanded. The state after a set of columns
    /// does not depend on the order they were taken in, given the same
    /// confirmed rows.
    seen: HashSet<([u32; MEMO_DEPTH], u64)>,
}

const MEMO_DEPTH: usize = 8;

impl Worker<'_> {
    fn push_column(&mut self, c: u64) {
        let j = self.cols.len();
        for i in positions(c) {
            self.rows[i] |= bit(j);
        }
        self.cols.push(c);
    }

    fn pop_column(&mut self) {
        let j = self.cols.len() - 1;
        let c = self.cols.pop().expect("a column to pop");
        for i in positions(c) {
            self.rows[i] &= !bit(j);
        }
    }

    /// Whether the facet in row `i` of the current matrix is an allowed type.
    fn row_is_facet(&mut self, i: usize) -> bool {
        let mask = self.rows[i];
        let width = mask.count_ones();
        if self.ctx.widths & 1u128 << width == 0 {
            return false;
        }
        self.extract(i);
        self.ctx.index.contains_rows(width as usize, &self.kept, &mut self.cache)
    }

    /// Leaves in `kept` the maximal rows of the matrix restricted to the
    /// columns of row `i`, without row `i`.
    fn extract(&mut self, i: usize) {
        let mask = self.rows[i];
        // rows restricted to the columns of row i, built column by column
        self.scratch.clear();
        self.scratch.resize(self.k, 0);
        for (n, j) in positions(mask).enumerate() {
            for a in positions(self.cols[j]) {
                self.scratch[a] |= bit(n);
            }
        }
        self.scratch.swap_remove(i);
        maximal_into(&mut self.scratch, &mut self.kept);
    }

    /// Every open row gains at least one more vertex (a free one or the
    /// last) and ends as an allowed facet. Deleting the vertices it gains
    /// leaves its current maximal restricted rows, so those must match some
    /// wider allowed facet cut down to the row's current vertices.
    fn open_rows_completable(&mut self, open: u64) -> bool {
        for i in positions(open) {
            let width = self.rows[i].count_ones() as usize;
            let Some(Some(deleted)) = self.ctx.deleted.get(width) else {
                continue;
            };
            self.extract(i);
            if !deleted.contains_rows(width, &self.kept, &mut self.deleted_cache) {
                return false;
            }
        }
        true
    }

    fn add_vertex(&mut self, remaining: usize, is_f: u64, cands: &[u32]) {
        self.nodes += 1;
        self.unreported += 1;
        if self.unreported >= 4096 {
            let n = std::mem::take(&mut self.unreported);
            if self.ctx.shared.should_stop(n) {
                return;
            }
        }
        if self.ctx.shared.abort.load(Ordering::Relaxed) {
            return;
        }
        if remaining == 1 {
            self.close(is_f);
            return;
        }
        if !self.open_rows_completable(!is_f & low_mask(self.k)) {
            return;
        }
        let minfv = self.ctx.spec.minfv;
        let need = (remaining as u32 - 1) * minfv;
        // each open row is below the widest facet, so a column costs one
        // unit of room per row
        let room = self.ctx.room(&self.rows, !is_f & low_mask(self.k));
        for &idx in cands {
            let c = self.pool[idx as usize];
            if room < need + c.count_ones() {
                continue;
            }
            if self.cols.len() == self.base_cols
                && self.stabilizer.iter().any(|pi| symmetry::permute_rows(c, pi) < c)
            {
                continue;
            }
            self.push_column(c);
            // a row reaching the widest facet must be confirmed now, since
            // every unconfirmed row still gains the last vertex
            let full = positions(c).filter(|&i| self.rows[i].count_ones() >= self.ctx.widest).fold(0, |w, i| w | bit(i));
            let mut next = is_f;
            let mut stuck = false;
            for i in positions(full) {
                if !self.row_is_facet(i) {
                    stuck = true;
                    break;
                }
                next |= bit(i);
            }
            if !stuck {
                for i in positions(c & !full) {
                    if self.row_is_facet(i) {
                        next |= bit(i);
                    }
                }
            }
            let open = !next & low_mask(self.k);
            if !stuck
                && open.count_ones() >= minfv
                && self.ctx.room(&self.rows, open) >= need
                && self.first_visit(idx, next)
            {
                // the last vertex needs no candidates
                let rest: Vec<u32> = if remaining > 2 {
                    cands
                        .iter()
                        .copied()
                        .filter(|&j| {
                            let d = self.pool[j as usize];
                            j != idx && d & next == 0 && extends_two_neighborly_last(&self.cols, d)
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                self.path.push(idx);
                self.add_vertex(remaining - 1, next, &rest);
                self.path.pop();
            }
            self.pop_column();
        }
    }

    /// Records the state reached by adding pool column `idx`.
    fn first_visit(&mut self, idx: u32, is_f: u64) -> bool {
        if self.path.len() >= MEMO_DEPTH {
            return true;
        }
        let mut key = [u32::MAX; MEMO_DEPTH];
        key[..self.path.len()].copy_from_slice(&self.path);
        key[self.path.len()] = idx;
        key.sort_unstable();
        self.seen.insert((key, is_f))
    }

    /// The last vertex lies on exactly the unconfirmed rows.
    fn close(&mut self, is_f: u64) {
        let c = !is_f & low_mask(self.k);
        if c.count_ones() < self.ctx.spec.minfv || !extends_two_neighborly(&self.cols, c) {
            return;
        }
        self.push_column(c);
        let ok = antichain(&self.rows) && positions(c).all(|i| self.row_is_facet(i));
        if ok {
            let m = IncidenceMatrix::new(self.cols.len(), self.rows.clone()).expect("shape within bounds");
            if validate(&m, self.ctx.spec.dim).is_empty() {
                self.out.push(m);
            }
        }
        self.pop_column();
    }
}

/// The inclusion-maximal words of `words`, one copy each, in no particular
/// order. A proper superset is numerically larger, so after a descending
/// sort each word only needs comparing with the maximal words already kept.
fn maximal_into(words: &mut [u64], kept: &mut Vec<u64>) {
    words.sort_unstable_by(|a, b| b.cmp(a));
    kept.clear();
    for &w in words.iter() {
        if !kept.iter().any(|&k| is_subset(w, k)) {
            kept.push(w);
        }
    }
}

fn antichain(words: &[u64]) -> bool {
    words
        .iter()
        .enumerate()
        .all(|(a, &x)| words.iter().enumerate().all(|(b, &y)| a == b || !is_subset(x, y)))
}
