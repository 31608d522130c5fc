//! Polytopes with `d + 2` and `d + 3` vertices, through their Gale diagrams.
//!
//! A `d + 3`-vertex polytope is described by labels on the center and on the
//! vertices of a regular `2n`-gon. Positions are taken modulo `2n`; the open
//! half-plane after position `i` is the run `i+1 ..= i+n-1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaleError {
    #[error("a diagram needs n ≥ 2 diameters, got {0}")]
    TooFewDiameters(usize),
    #[error("expected {expected} labels for n = {n}, found {found}")]
    LabelCount { n: usize, expected: usize, found: usize },
    #[error("cannot parse diagram {0:?}; expected `n=<n> mC=<c> labels=<m0>,<m1>,...`")]
    Parse(String),
}

/// A `d`-polytope with `d + 2` vertices: `m0` points at the center and the
/// opposite multiplicities `m1`, `m_neg1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GalePair {
    pub m0: u32,
    pub m1: u32,
    pub m_neg1: u32,
}

impl GalePair {
    pub fn dim(&self) -> u32 {
        self.m0 + self.m1 + self.m_neg1 - 2
    }

    pub fn vertices(&self) -> u32 {
        self.m0 + self.m1 + self.m_neg1
    }

    pub fn facets(&self) -> u32 {
        self.m0 + self.m1 * self.m_neg1
    }

    pub fn is_two_neighborly(&self) -> bool {
        self.m1 >= 3 && self.m_neg1 >= 3
    }
}

/// Unordered pairs `{a, b}`, `3 ≤ a ≤ b`, whose polytopes have at most
/// `d + 2 + excess` facets. The center multiplicity cancels from the bound.
pub fn enumerate_gale_pairs(excess: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut a = 3u32;
    while a * a <= 2 * a + excess {
        let mut b = a;
        while a * b <= a + b + excess {
            out.push((a, b));
            b += 1;
        }
        a += 1;
    }
    out
}

/// Labels `m_0 … m_{2n−1}` on a regular `2n`-gon plus the center label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedGaleDiagram {
    n: usize,
    labels: Vec<u32>,
    mc: u32,
}

/// `(d, vertices, facets, is_pyramid)`.
pub type Profile = (u32, u32, u64, bool);

impl ReducedGaleDiagram {
    pub fn new(n: usize, labels: Vec<u32>, mc: u32) -> Result<Self, GaleError> {
        if n < 2 {
            return Err(GaleError::TooFewDiameters(n));
        }
        if labels.len() != 2 * n {
            return Err(GaleError::LabelCount {
                n,
                expected: 2 * n,
                found: labels.len(),
            });
        }
        Ok(Self { n, labels, mc })
    }

    /// A diagram with the center empty and `n` taken from the label count.
    pub fn from_labels(labels: &[u32]) -> Result<Self, GaleError> {
        Self::new(labels.len() / 2, labels.to_vec(), 0).and_then(|d| {
            if labels.len() % 2 == 1 {
                Err(GaleError::LabelCount {
                    n: d.n,
                    expected: 2 * d.n,
                    found: labels.len(),
                })
            } else {
                Ok(d)
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn center(&self) -> u32 {
        self.mc
    }

    pub fn with_center(&self, mc: u32) -> Self {
        Self { mc, ..self.clone() }
    }

    fn at(&self, i: usize) -> u32 {
        self.labels[i % (2 * self.n)]
    }

    pub fn vertex_count(&self) -> u32 {
        self.mc + self.labels.iter().sum::<u32>()
    }

    /// Sum over the open half-plane after position `i`.
    pub fn window_sum(&self, i: usize) -> u32 {
        (i + 1..i + self.n).map(|j| self.at(j)).sum()
    }

    /// No diameter has both labels zero.
    pub fn p2(&self) -> bool {
        (0..self.n).all(|i| self.labels[i] + self.labels[i + self.n] > 0)
    }

    /// No two neighbours are both zero.
    pub fn p3(&self) -> bool {
        (0..2 * self.n).all(|i| self.at(i) + self.at(i + 1) > 0)
    }

    /// Every open half-plane sums to at least 2.
    pub fn p4(&self) -> bool {
        (0..2 * self.n).all(|i| self.window_sum(i) >= 2)
    }

    pub fn is_valid(&self) -> bool {
        self.p2() && self.p3() && self.p4()
    }

    /// Every open half-plane sums to at least 3.
    pub fn is_two_neighborly(&self) -> bool {
        (0..2 * self.n).all(|i| self.window_sum(i) >= 3)
    }

    /// Center points, opposite pairs, and triangles strictly around the
    /// center, counted with multiplicity. A triangle contains the center iff
    /// all three cyclic gaps between its corners are below `n`.
    pub fn count_cofacets(&self) -> u64 {
        let n = self.n;
        let m: Vec<u64> = self.labels.iter().map(|&x| x as u64).collect();
        let mut total = self.mc as u64;
        total += (0..n).map(|i| m[i] * m[i + n]).sum::<u64>();
        for i in 0..2 * n {
            if m[i] == 0 {
                continue;
            }
            for j in i + 1..(i + n).min(2 * n) {
                if m[j] == 0 {
                    continue;
                }
                // k − j < n and 2n − (k − i) < n
                for k in (i + n + 1).max(j + 1)..(j + n).min(2 * n) {
                    total += m[i] * m[j] * m[k];
                }
            }
        }
        total
    }

    pub fn profile(&self) -> Profile {
        let v = self.vertex_count();
        (v.saturating_sub(3), v, self.count_cofacets(), self.mc > 0)
    }

    /// The diagram with label `i` lowered by one, if that label is positive.
    pub fn decremented(&self, i: usize) -> Option<Self> {
        let mut out = self.clone();
        let slot = out.labels.get_mut(i)?;
        *slot = slot.checked_sub(1)?;
        Some(out)
    }

    pub fn incremented(&self, i: usize) -> Option<Self> {
        let mut out = self.clone();
        *out.labels.get_mut(i)? += 1;
        Some(out)
    }

    /// Drop in cofacets when label `i` is lowered by one; `None` when the
    /// label is zero or the lowered diagram violates a diagram property.
    pub fn lemma1_delta(&self, i: usize) -> Option<i64> {
        let lower = self.decremented(i).filter(Self::is_valid)?;
        Some(self.count_cofacets() as i64 - lower.count_cofacets() as i64)
    }

    /// Gain in cofacets when a point is added at position `i`, or at the
    /// center for `None`.
    pub fn add_point_delta(&self, i: Option<usize>) -> Option<i64> {
        let upper = match i {
            Some(i) => self.incremented(i)?,
            None => self.with_center(self.mc + 1),
        };
        Some(upper.count_cofacets() as i64 - self.count_cofacets() as i64)
    }

    /// No single-label decrement gives a valid 2-neighborly diagram on the
    /// same polygon.
    pub fn is_minimal(&self) -> bool {
        if self.mc > 0 {
            return false;
        }
        (0..2 * self.n).all(|i| {
            self.decremented(i)
                .map_or(true, |d| !(d.is_valid() && d.is_two_neighborly()))
        })
    }

    /// The lexicographically least label sequence over all rotations and
    /// reflections of the polygon.
    pub fn canonical(&self) -> Self {
        let len = 2 * self.n;
        let mut best = self.labels.clone();
        for r in 0..len {
            let rot: Vec<u32> = (0..len).map(|j| self.labels[(r + j) % len]).collect();
            let refl: Vec<u32> = (0..len).map(|j| self.labels[(r + len - j) % len]).collect();
            best = best.min(rot).min(refl);
        }
        Self {
            n: self.n,
            labels: best,
            mc: self.mc,
        }
    }
}

impl fmt::Display for ReducedGaleDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(u32::to_string).collect();
        write!(f, "n={} mC={} labels={}", self.n, self.mc, labels.join(","))
    }
}

impl FromStr for ReducedGaleDiagram {
    type Err = GaleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GaleError::Parse(s.to_string());
        let mut n = None;
        let mut mc = None;
        let mut labels = None;
        for part in s.split_whitespace() {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "mC" => mc = Some(value.parse::<u32>().map_err(|_| bad())?),
                "labels" => {
                    labels = Some(
                        value
                            .split(',')
                            .map(|x| x.parse::<u32>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| bad())?,
                    )
                }
                _ => return Err(bad()),
            }
        }
        let (Some(n), Some(labels)) = (n, labels) else {
            return Err(bad());
        };
        Self::new(n, labels, mc.unwrap_or(0))
    }
}

/// Calls `visit` on every valid 2-neighborly diagram with an empty center,
/// `n` diameters and labels at most `max_label`. With `minimal_only`,
/// branches that cannot be minimal are cut and only minimal diagrams are
/// visited.
pub fn for_each_diagram(n: usize, max_label: u32, minimal_only: bool, mut visit: impl FnMut(&ReducedGaleDiagram)) {
    if n < 2 {
        return;
    }
    let mut labels = vec![0u32; 2 * n];
    dfs(n, max_label, minimal_only, 0, &mut labels, &mut visit);
}

fn dfs(
    n: usize,
    max_label: u32,
    minimal_only: bool,
    p: usize,
    labels: &mut Vec<u32>,
    visit: &mut impl FnMut(&ReducedGaleDiagram),
) {
    let len = 2 * n;
    if p == len {
        let d = ReducedGaleDiagram {
            n,
            labels: labels.clone(),
            mc: 0,
        };
        if d.is_valid() && d.is_two_neighborly() && (!minimal_only || d.is_minimal()) {
            visit(&d);
        }
        return;
    }
    for x in 0..=max_label {
        labels[p] = x;
        if p > 0 && x == 0 && labels[p - 1] == 0 {
            continue;
        }
        if p >= n && x == 0 && labels[p - n] == 0 {
            continue;
        }
        // the window ending at p is now complete
        if p + 2 >= n && labels[p + 2 - n..=p].iter().sum::<u32>() < 3 {
            continue;
        }
        if minimal_only && !could_be_minimal(n, p, labels) {
            continue;
        }
        dfs(n, max_label, minimal_only, p + 1, labels, visit);
    }
    labels[p] = 0;
}

/// Positions `0..=p` are assigned. Rejects a prefix when some assigned
/// positive label lies only in half-planes whose assigned part already sums
/// above 3, and lowering it cannot create a zero diameter or a zero pair
/// either.
fn could_be_minimal(n: usize, p: usize, labels: &[u32]) -> bool {
    let len = 2 * n;
    let assigned_sum = |start: usize| -> u32 {
        (start..start + n - 1)
            .map(|j| j % len)
            .filter(|&j| j <= p)
            .map(|j| labels[j])
            .sum()
    };
    let known_nonzero = |j: usize| j <= p && labels[j] > 0;
    (0..=p).all(|q| {
        let tight_possible = (1..n).any(|off| assigned_sum((q + len - off + 1) % len) <= 3);
        match labels[q] {
            0 => true,
            1 => {
                tight_possible
                    || !known_nonzero((q + len - 1) % len)
                    || !known_nonzero((q + 1) % len)
                    || !known_nonzero((q + n) % len)
            }
            _ => tight_possible,
        }
    })
}

/// Minimal 2-neighborly diagrams with empty center, labels at most
/// `max_label` and at most `max_n` diameters, one per rotation/reflection
/// class, sorted by `n` and then by labels. With `max_excess`, only those
/// with at most `d + max_excess` cofacets.
pub fn enumerate_minimal_diagrams(max_label: u32, max_n: usize, max_excess: Option<u32>) -> Vec<ReducedGaleDiagram> {
    let mut out = std::collections::BTreeSet::new();
    for n in 2..=max_n {
        for_each_diagram(n, max_label, true, |d| {
            let (dim, _, facets, _) = d.profile();
            if max_excess.map_or(true, |e| facets <= u64::from(dim + e)) {
                out.insert(d.canonical());
            }
        });
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort_by(|a, b| (a.n, &a.labels).cmp(&(b.n, &b.labels)));
    v
}
