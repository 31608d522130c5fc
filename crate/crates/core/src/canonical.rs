//! Canonical forms under independent row and column permutations, and the
//! membership index for allowed facet types.
//!
//! Narrow matrices get the exact lexicographic minimum, over all column
//! permutations, of the row-sorted matrix. Wider ones are labeled by
//! individualization-refinement on the bipartite row/column incidence
//! structure. A given matrix is keyed by exactly one of the two routes, so
//! keys from different routes never need to agree.
//!
//! Both searches share the same pruning: automorphisms are recovered from
//! pairs of equivalent leaves, children in the same orbit of the path
//! stabilizer are skipped, and on finding a leaf equivalent to the first or
//! best leaf the search returns to the node where the two paths part.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::incmat::{bit, low_mask, positions, IncidenceMatrix};

/// Widest matrix keyed by the exact lexicographic route.
pub const DEFAULT_LEXMIN_THRESHOLD: usize = 10;
/// Widest member whose column permutations are expanded in a [`FacetIndex`].
pub const DEFAULT_EXPANSION_WIDTH: usize = 10;
/// Bound on the number of stored permutation variants.
pub const DEFAULT_MAX_VARIANTS: usize = 10_000_000;

const TAG_LEXMIN: u8 = 0;
const TAG_REFINE: u8 = 1;

/// Byte string identifying a permutation class of incidence matrices:
/// a route tag, the shape, and the canonical bit block packed row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    fn new(tag: u8, cols: usize, rows: &[u64]) -> Self {
        let mut bytes = vec![tag, rows.len() as u8, cols as u8];
        let mut acc = 0u8;
        let mut filled = 0;
        for &r in rows {
            for j in 0..cols {
                acc = (acc << 1) | u8::from(r & bit(j) != 0);
                filled += 1;
                if filled == 8 {
                    bytes.push(acc);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            bytes.push(acc << (8 - filled));
        }
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

pub fn canonical_key(m: &IncidenceMatrix) -> CanonicalKey {
    canonical_form(m).0
}

pub fn canonical_key_with_threshold(m: &IncidenceMatrix, threshold: usize) -> CanonicalKey {
    canonical_form_with_threshold(m, threshold).0
}

/// The key together with the canonical representative it serializes.
pub fn canonical_form(m: &IncidenceMatrix) -> (CanonicalKey, IncidenceMatrix) {
    canonical_form_with_threshold(m, DEFAULT_LEXMIN_THRESHOLD)
}

pub fn canonical_form_with_threshold(m: &IncidenceMatrix, threshold: usize) -> (CanonicalKey, IncidenceMatrix) {
    let (tag, rows) = if m.cols() <= threshold {
        (TAG_LEXMIN, lexmin_rows(m))
    } else {
        (TAG_REFINE, refine_rows(m))
    };
    let key = CanonicalKey::new(tag, m.cols(), &rows);
    let form = IncidenceMatrix::new(m.cols(), rows).expect("a permutation keeps the shape");
    (key, form)
}

/// The row permutation of an automorphism; its column part is implied.
#[derive(Debug, Clone)]
struct Generator {
    rows: Vec<u8>,
}

#[derive(Debug, Default)]
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Index of the first position where two paths differ.
fn divergence(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()))
}

// ---------------------------------------------------------------------------
// Exact lexicographic minimum

/// Value of `row` when the column cells are laid out in order and, inside
/// each cell, the row's ones are pushed to the end.
fn least_value(row: u64, cells: &[u64]) -> u64 {
    let mut out = 0u64;
    let mut offset = 0usize;
    for &c in cells {
        let size = c.count_ones() as usize;
        let ones = (row & c).count_ones() as usize;
        if ones > 0 {
            out |= low_mask(ones) >> (offset + size - ones);
        }
        offset += size;
    }
    out
}

fn split_cells(cells: &[u64], row: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(cells.len() + 1);
    for &c in cells {
        let zero = c & !row;
        let one = c & row;
        if zero != 0 {
            out.push(zero);
        }
        if one != 0 {
            out.push(one);
        }
    }
    out
}

struct LexLeaf {
    values: Vec<u64>,
    path: Vec<u8>,
    cols: Vec<u8>,
}

struct Lexmin<'a> {
    rows: &'a [u64],
    first: Option<LexLeaf>,
    best: Option<LexLeaf>,
    gens: Vec<Generator>,
}

fn lexmin_rows(m: &IncidenceMatrix) -> Vec<u64> {
    let mut s = Lexmin {
        rows: m.row_words(),
        first: None,
        best: None,
        gens: Vec::new(),
    };
    let mut path = Vec::with_capacity(m.rows());
    let mut values = Vec::with_capacity(m.rows());
    s.visit(vec![m.column_mask()], 0, &mut path, &mut values);
    s.best.expect("at least one leaf").values
}

impl Lexmin<'_> {
    fn leaf(&mut self, cells: &[u64], path: &[u8], values: &[u64]) -> Option<usize> {
        let cols: Vec<u8> = cells.iter().flat_map(|&c| positions(c)).map(|p| p as u8).collect();
        let leaf = LexLeaf {
            values: values.to_vec(),
            path: path.to_vec(),
            cols,
        };
        let Some(first) = &self.first else {
            self.first = Some(LexLeaf {
                values: leaf.values.clone(),
                path: leaf.path.clone(),
                cols: leaf.cols.clone(),
            });
            self.best = Some(leaf);
            return None;
        };
        let best = self.best.as_ref().expect("set with first");
        for other in [first, best] {
            if other.values == leaf.values {
                let mut rows = vec![0u8; self.rows.len()];
                for (a, b) in other.path.iter().zip(&leaf.path) {
                    rows[*a as usize] = *b;
                }
                let at = divergence(&other.path, &leaf.path);
                self.gens.push(Generator { rows });
                return Some(at);
            }
        }
        if leaf.values < best.values {
            self.best = Some(leaf);
        }
        None
    }

    fn visit(&mut self, cells: Vec<u64>, chosen: u64, path: &mut Vec<u8>, values: &mut Vec<u64>) -> Option<usize> {
        let depth = path.len();
        if depth == self.rows.len() {
            return self.leaf(&cells, path, values);
        }
        let mut least = u64::MAX;
        let mut candidates = Vec::new();
        for (r, &row) in self.rows.iter().enumerate() {
            if chosen & bit(r) != 0 {
                continue;
            }
            let v = least_value(row, &cells);
            if v < least {
                least = v;
                candidates.clear();
            }
            if v == least {
                candidates.push(r);
            }
        }
        if let Some(best) = &self.best {
            let mut prefix = values.clone();
            prefix.push(least);
            if prefix.as_slice() > &best.values[..=depth] {
                return None;
            }
        }
        let mut explored: Vec<usize> = Vec::new();
        for &r in &candidates {
            if !explored.is_empty() && self.same_orbit(path, r, &explored) {
                continue;
            }
            explored.push(r);
            let next = split_cells(&cells, self.rows[r]);
            path.push(r as u8);
            values.push(least);
            let jump = self.visit(next, chosen | bit(r), path, values);
            path.pop();
            values.pop();
            match jump {
                Some(at) if at < depth => return Some(at),
                _ => {}
            }
        }
        None
    }

    fn same_orbit(&self, path: &[u8], r: usize, explored: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.rows.len());
        let mut any = false;
        for g in &self.gens {
            if path.iter().all(|&p| g.rows[p as usize] == p) {
                any = true;
                for (a, &b) in g.rows.iter().enumerate() {
                    uf.union(a, b as usize);
                }
            }
        }
        any && explored.iter().any(|&e| uf.find(e) == uf.find(r))
    }
}

// ---------------------------------------------------------------------------
// Individualization-refinement

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    is_row: bool,
    mask: u64,
}

struct IrLeaf {
    cert: Vec<u64>,
    path: Vec<u8>,
    order: Vec<u8>,
}

struct Refiner<'a> {
    k: usize,
    n: usize,
    rows: &'a [u64],
    cols: Vec<u64>,
    first: Option<IrLeaf>,
    best: Option<IrLeaf>,
    gens: Vec<Vec<u8>>,
}

fn refine_rows(m: &IncidenceMatrix) -> Vec<u64> {
    let mut s = Refiner {
        k: m.rows(),
        n: m.cols(),
        rows: m.row_words(),
        cols: m.column_words(),
        first: None,
        best: None,
        gens: Vec::new(),
    };
    let mut cells = vec![
        Cell {
            is_row: true,
            mask: low_mask(m.rows()),
        },
        Cell {
            is_row: false,
            mask: m.column_mask(),
        },
    ];
    s.refine(&mut cells);
    let mut path = Vec::new();
    s.visit(cells, &mut path);
    s.best.expect("at least one leaf").cert
}

impl Refiner<'_> {
    fn adjacency(&self, cell: &Cell, member: usize) -> u64 {
        if cell.is_row {
            self.rows[member]
        } else {
            self.cols[member]
        }
    }

    /// Splits cells until every cell has constant degree into every cell of
    /// the other side. Fragments are ordered by increasing degree, so the
    /// result depends only on the cell order, never on labels.
    fn refine(&self, cells: &mut Vec<Cell>) {
        'again: loop {
            for y in 0..cells.len() {
                let splitter = cells[y];
                for x in 0..cells.len() {
                    let target = cells[x];
                    if target.is_row == splitter.is_row || target.mask.count_ones() < 2 {
                        continue;
                    }
                    let mut degrees: Vec<(u32, usize)> = positions(target.mask)
                        .map(|v| ((self.adjacency(&target, v) & splitter.mask).count_ones(), v))
                        .collect();
                    if degrees.iter().all(|d| d.0 == degrees[0].0) {
                        continue;
                    }
                    degrees.sort_unstable();
                    let mut fragments: Vec<Cell> = Vec::new();
                    let mut last = None;
                    for (deg, v) in degrees {
                        if last != Some(deg) {
                            fragments.push(Cell {
                                is_row: target.is_row,
                                mask: 0,
                            });
                            last = Some(deg);
                        }
                        fragments.last_mut().expect("pushed above").mask |= bit(v);
                    }
                    cells.splice(x..=x, fragments);
                    continue 'again;
                }
            }
            return;
        }
    }

    fn vertex_id(&self, cell: &Cell, member: usize) -> u8 {
        if cell.is_row {
            member as u8
        } else {
            (self.k + member) as u8
        }
    }

    fn leaf(&mut self, cells: &[Cell], path: &[u8]) -> Option<usize> {
        let mut order = Vec::with_capacity(self.k + self.n);
        let row_order: Vec<usize> = cells.iter().filter(|c| c.is_row).map(|c| c.mask.leading_zeros() as usize).collect();
        let col_order: Vec<usize> = cells.iter().filter(|c| !c.is_row).map(|c| c.mask.leading_zeros() as usize).collect();
        order.extend(row_order.iter().map(|&r| r as u8));
        order.extend(col_order.iter().map(|&c| (self.k + c) as u8));
        let cert: Vec<u64> = row_order
            .iter()
            .map(|&r| {
                col_order
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| self.rows[r] & bit(c) != 0)
                    .fold(0u64, |w, (j, _)| w | bit(j))
            })
            .collect();
        let leaf = IrLeaf {
            cert,
            path: path.to_vec(),
            order,
        };
        let Some(first) = &self.first else {
            self.first = Some(IrLeaf {
                cert: leaf.cert.clone(),
                path: leaf.path.clone(),
                order: leaf.order.clone(),
            });
            self.best = Some(leaf);
            return None;
        };
        let best = self.best.as_ref().expect("set with first");
        for other in [first, best] {
            if other.cert == leaf.cert {
                let mut g = vec![0u8; self.k + self.n];
                for (a, b) in other.order.iter().zip(&leaf.order) {
                    g[*a as usize] = *b;
                }
                let at = divergence(&other.path, &leaf.path);
                self.gens.push(g);
                return Some(at);
            }
        }
        if leaf.cert < best.cert {
            self.best = Some(leaf);
        }
        None
    }

    fn visit(&mut self, cells: Vec<Cell>, path: &mut Vec<u8>) -> Option<usize> {
        let depth = path.len();
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.mask.count_ones() > 1)
            .min_by_key(|(i, c)| (c.mask.count_ones(), *i))
            .map(|(i, _)| i);
        let Some(t) = target else {
            return self.leaf(&cells, path);
        };
        let cell = cells[t];
        let mut explored: Vec<u8> = Vec::new();
        for v in positions(cell.mask) {
            let id = self.vertex_id(&cell, v);
            if !explored.is_empty() && self.same_orbit(path, id, &explored) {
                continue;
            }
            explored.push(id);
            let mut next = cells.clone();
            next.splice(
                t..=t,
                [
                    Cell {
                        is_row: cell.is_row,
                        mask: bit(v),
                    },
                    Cell {
                        is_row: cell.is_row,
                        mask: cell.mask & !bit(v),
                    },
                ],
            );
            self.refine(&mut next);
            path.push(id);
            let jump = self.visit(next, path);
            path.pop();
            match jump {
                Some(at) if at < depth => return Some(at),
                _ => {}
            }
        }
        None
    }

    fn same_orbit(&self, path: &[u8], id: u8, explored: &[u8]) -> bool {
        let mut uf = UnionFind::new(self.k + self.n);
        let mut any = false;
        for g in &self.gens {
            if path.iter().all(|&p| g[p as usize] == p) {
                any = true;
                for (a, &b) in g.iter().enumerate() {
                    uf.union(a, b as usize);
                }
            }
        }
        any && explored.iter().any(|&e| uf.find(e as usize) == uf.find(id as usize))
    }
}

// ---------------------------------------------------------------------------
// Facet membership

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("expanding the facet list needs more than {limit} variants")]
    TooManyVariants { limit: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct IndexConfig {
    pub expansion_width: usize,
    pub max_variants: usize,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            expansion_width: DEFAULT_EXPANSION_WIDTH,
            max_variants: DEFAULT_MAX_VARIANTS,
        }
    }
}

/// Cheap permutation invariants: shape and sorted row and column degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    rows: usize,
    cols: usize,
    row_degrees: Vec<u8>,
    col_degrees: Vec<u8>,
}

impl Profile {
    pub fn of(m: &IncidenceMatrix) -> Self {
        let mut row_degrees: Vec<u8> = m.row_words().iter().map(|r| r.count_ones() as u8).collect();
        let mut col_degrees: Vec<u8> = m.column_words().iter().map(|c| c.count_ones() as u8).collect();
        row_degrees.sort_unstable();
        col_degrees.sort_unstable();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            row_degrees,
            col_degrees,
        }
    }
}

/// The allowed facet types. Narrow members are stored as every distinct
/// row-sorted column permutation, so a lookup is a sort and a binary search;
/// wide members are stored by canonical key.
#[derive(Debug, Clone)]
pub struct FacetIndex {
    config: IndexConfig,
    /// `(rows, cols)` to a flat sorted array of variants, `rows` words each.
    variants: HashMap<(usize, usize), Vec<u16>>,
    wide: HashSet<CanonicalKey>,
    wide_profiles: HashSet<Profile>,
    members: Vec<IncidenceMatrix>,
}

/// Per-worker memo of wide lookups.
pub type LookupCache = HashMap<IncidenceMatrix, bool>;

impl FacetIndex {
    pub fn build(members: &[IncidenceMatrix]) -> Result<Self, IndexError> {
        Self::build_with(members, IndexConfig::default())
    }

    pub fn build_with(members: &[IncidenceMatrix], config: IndexConfig) -> Result<Self, IndexError> {
        let mut variants: HashMap<(usize, usize), Vec<Vec<u16>>> = HashMap::new();
        let mut wide = HashSet::new();
        let mut wide_profiles = HashSet::new();
        let mut total = 0usize;
        for m in members {
            if m.cols() > config.expansion_width {
                wide.insert(canonical_key(m));
                wide_profiles.insert(Profile::of(m));
                continue;
            }
            let group = variants.entry((m.rows(), m.cols())).or_default();
            let before = group.len();
            expand_member(m, group);
            total += group.len() - before;
            if total > config.max_variants {
                return Err(IndexError::TooManyVariants {
                    limit: config.max_variants,
                });
            }
            group.sort_unstable();
            group.dedup();
            total = variants.values().map(Vec::len).sum();
        }
        let variants = variants
            .into_iter()
            .map(|(shape, group)| (shape, group.into_iter().flatten().collect()))
            .collect();
        Ok(Self {
            config,
            variants,
            wide,
            wide_profiles,
            members: members.to_vec(),
        })
    }

    pub fn members(&self) -> &[IncidenceMatrix] {
        &self.members
    }

    /// Number of stored narrow variants.
    pub fn variant_count(&self) -> usize {
        self.variants.iter().map(|(&(k, _), flat)| flat.len() / k).sum()
    }

    pub fn wide_count(&self) -> usize {
        self.wide.len()
    }

    pub fn expansion_width(&self) -> usize {
        self.config.expansion_width
    }

    pub fn contains(&self, a: &IncidenceMatrix) -> bool {
        if a.cols() <= self.config.expansion_width {
            self.contains_narrow(a.cols(), a.row_words())
        } else {
            self.wide_profiles.contains(&Profile::of(a)) && self.wide.contains(&canonical_key(a))
        }
    }

    /// As [`contains`](Self::contains), memoizing wide lookups.
    pub fn contains_cached(&self, a: &IncidenceMatrix, cache: &mut LookupCache) -> bool {
        if a.cols() <= self.config.expansion_width {
            return self.contains_narrow(a.cols(), a.row_words());
        }
        if !self.wide_profiles.contains(&Profile::of(a)) {
            return false;
        }
        if let Some(&hit) = cache.get(a) {
            return hit;
        }
        let hit = self.wide.contains(&canonical_key(a));
        cache.insert(a.clone(), hit);
        hit
    }

    /// Membership of the matrix with the given row words, avoiding an
    /// allocation on the narrow path.
    pub fn contains_rows(&self, cols: usize, rows: &[u64], cache: &mut LookupCache) -> bool {
        if cols <= self.config.expansion_width {
            return self.contains_narrow(cols, rows);
        }
        match IncidenceMatrix::new(cols, rows.to_vec()) {
            Ok(a) => self.contains_cached(&a, cache),
            Err(_) => false,
        }
    }

    fn contains_narrow(&self, cols: usize, rows: &[u64]) -> bool {
        let k = rows.len();
        let Some(flat) = self.variants.get(&(k, cols)) else {
            return false;
        };
        let shift = 64 - cols;
        let mut buf = [0u16; 64];
        let probe = &mut buf[..k];
        for (p, &r) in probe.iter_mut().zip(rows) {
            *p = (r >> shift) as u16;
        }
        probe.sort_unstable();
        let probe = &*probe;
        let count = flat.len() / k;
        let (mut lo, mut hi) = (0usize, count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match flat[mid * k..(mid + 1) * k].cmp(probe) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Appends the row-sorted form of every column permutation of `m`, visiting
/// permutations by Heap's algorithm so each step is one column swap.
fn expand_member(m: &IncidenceMatrix, out: &mut Vec<Vec<u16>>) {
    let n = m.cols();
    let shift = 64 - n;
    let mut rows: Vec<u16> = m.row_words().iter().map(|&r| (r >> shift) as u16).collect();
    let emit = |rows: &[u16], out: &mut Vec<Vec<u16>>| {
        let mut v = rows.to_vec();
        v.sort_unstable();
        out.push(v);
    };
    emit(&rows, out);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            // swap columns i and j; column p lives at bit n-1-p
            let (bi, bj) = (n - 1 - i, n - 1 - j);
            for r in rows.iter_mut() {
                let x = ((*r >> bi) ^ (*r >> bj)) & 1;
                *r ^= (x << bi) | (x << bj);
            }
            emit(&rows, out);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
