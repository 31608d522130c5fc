//! Exact facet enumeration for small integer point sets, and the catalog of
//! reference polytopes built on it.
//!
//! Every `d`-subset of points that spans a hyperplane is tested as a facet
//! candidate. Arithmetic is on `i64` with overflow checks throughout; with
//! coordinates in `{-1, 0, 1}` and `d ≤ 10` no intermediate value comes near
//! the limit.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::incmat::{bit, is_two_neighborly, IncidenceMatrix, MatrixError};
use crate::lattice::{build_poset, LatticeError};

/// Default bound on the number of input points.
pub const DEFAULT_POINT_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HullError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("points span an affine space of dimension {found}, expected {expected}")]
    NotFullDimensional { expected: usize, found: usize },
    #[error("point {0} is not a vertex of the convex hull")]
    NonVertex(usize),
    #[error("{count} points exceed the limit of {limit}")]
    TooManyPoints { count: usize, limit: usize },
    #[error("point {index} has {found} coordinates, expected {expected}")]
    WrongLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointList {
    pub dim: usize,
    pub points: Vec<Vec<i64>>,
}

impl PointList {
    pub fn new(dim: usize, points: Vec<Vec<i64>>) -> Result<Self, HullError> {
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(HullError::WrongLength {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                if points[a] == points[b] {
                    return Err(HullError::Duplicate(a, b));
                }
            }
        }
        Ok(Self { dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn sub(a: &[i64], b: &[i64]) -> Result<Vec<i64>, HullError> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(*y).ok_or(HullError::Overflow))
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> Result<i64, HullError> {
    a.iter().zip(b).try_fold(0i64, |acc, (x, y)| {
        x.checked_mul(*y)
            .and_then(|p| acc.checked_add(p))
            .ok_or(HullError::Overflow)
    })
}

/// Fraction-free elimination. Returns the rank and, for square input, the
/// determinant.
fn bareiss(mut a: Vec<Vec<i64>>) -> Result<(usize, i64), HullError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i64;
    let mut sign = 1i64;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let lhs = a[rank][c].checked_mul(a[r][j]);
                let rhs = a[r][c].checked_mul(a[rank][j]);
                let num = lhs
                    .zip(rhs)
                    .and_then(|(l, r)| l.checked_sub(r))
                    .ok_or(HullError::Overflow)?;
                // exact by Sylvester's identity
                a[r][j] = num / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    let det = if rank == rows && rows == cols {
        if rows == 0 {
            1
        } else {
            sign * a[rows - 1][cols - 1]
        }
    } else {
        0
    };
    Ok((rank, det))
}

fn rank(vectors: Vec<Vec<i64>>) -> Result<usize, HullError> {
    if vectors.is_empty() {
        return Ok(0);
    }
    bareiss(vectors).map(|(r, _)| r)
}

fn det(m: Vec<Vec<i64>>) -> Result<i64, HullError> {
    bareiss(m).map(|(_, d)| d)
}

/// Affine dimension of the point set: the rank of the differences to the
/// first point.
pub fn affine_dim(pts: &PointList) -> Result<usize, HullError> {
    let Some(first) = pts.points.first() else {
        return Ok(0);
    };
    let diffs = pts.points[1..]
        .iter()
        .map(|p| sub(p, first))
        .collect::<Result<Vec<_>, _>>()?;
    rank(diffs)
}

/// Integer normal of the hyperplane through `d` points, by cofactor
/// expansion. Zero iff the points are affinely dependent.
fn normal(points: &[&Vec<i64>]) -> Result<Vec<i64>, HullError> {
    let d = points[0].len();
    let w = points[1..]
        .iter()
        .map(|p| sub(p, points[0]))
        .collect::<Result<Vec<_>, _>>()?;
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<i64>> = w
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let m = det(minor)?;
            Ok(if j % 2 == 0 { m } else { -m })
        })
        .collect()
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<(), HullError>) -> Result<(), HullError> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return Ok(());
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The facet-vertex incidence matrix of the convex hull, with columns in
/// input order and rows sorted ascending.
pub fn facets_from_vertices(pts: &PointList) -> Result<IncidenceMatrix, HullError> {
    facets_with_limit(pts, DEFAULT_POINT_LIMIT)
}

pub fn facets_with_limit(pts: &PointList, limit: usize) -> Result<IncidenceMatrix, HullError> {
    let n = pts.len();
    let d = pts.dim;
    if n > limit.min(crate::incmat::MAX_WIDTH) {
        return Err(HullError::TooManyPoints { count: n, limit });
    }
    let found = affine_dim(pts)?;
    if found != d || d == 0 {
        return Err(HullError::NotFullDimensional { expected: d, found });
    }
    let mut facets = BTreeSet::new();
    for_each_subset(n, d, |idx| {
        let chosen: Vec<&Vec<i64>> = idx.iter().map(|&i| &pts.points[i]).collect();
        let nrm = normal(&chosen)?;
        if nrm.iter().all(|&x| x == 0) {
            return Ok(());
        }
        let offset = dot(&nrm, chosen[0])?;
        let mut residues = Vec::with_capacity(n);
        for p in &pts.points {
            residues.push(dot(&nrm, p)?.checked_sub(offset).ok_or(HullError::Overflow)?);
        }
        let (lo, hi) = residues.iter().fold((false, false), |(lo, hi), &r| (lo || r < 0, hi || r > 0));
        if lo && hi {
            return Ok(());
        }
        let on = residues
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == 0)
            .fold(0u64, |w, (i, _)| w | bit(i));
        facets.insert(on);
        Ok(())
    })?;
    let rows: Vec<u64> = facets.into_iter().collect();
    for p in 0..n {
        let on = rows.iter().filter(|&&r| r & bit(p) != 0).count();
        if on < d {
            return Err(HullError::NonVertex(p));
        }
    }
    Ok(IncidenceMatrix::new(n, rows)?)
}

/// A named reference polytope with its expected `(d, v, f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub d: usize,
    pub v: usize,
    pub f: usize,
    pub points: PointList,
}

impl CatalogEntry {
    pub fn incidence(&self) -> Result<IncidenceMatrix, HullError> {
        facets_from_vertices(&self.points)
    }

    /// `(v − d − 1, f − d − 1)`, the position in the classification plot.
    pub fn excess(&self) -> (i64, i64) {
        let d = self.d as i64;
        (self.v as i64 - d - 1, self.f as i64 - d - 1)
    }
}

/// Parses `name d v f` headers, each followed by `v` lines of `d` integers.
/// Blank lines and `#` comments are ignored.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, HullError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some((line, header)) = lines.next() {
        let err = |line: usize, message: String| HullError::Parse { line, message };
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(err(line, format!("expected `name d v f`, found {header:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad number {s:?}")));
        let (d, v, f) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
        let mut points = Vec::with_capacity(v);
        for _ in 0..v {
            let (pl, text) = lines
                .next()
                .ok_or_else(|| err(line, format!("expected {v} points, file ended")))?;
            let p = text
                .split_whitespace()
                .map(|x| x.parse::<i64>().map_err(|_| err(pl, format!("bad coordinate {x:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if p.len() != d {
                return Err(err(pl, format!("expected {d} coordinates, found {}", p.len())));
            }
            points.push(p);
        }
        out.push(CatalogEntry {
            name: parts[0].to_string(),
            d,
            v,
            f,
            points: PointList::new(d, points)?,
        });
    }
    Ok(out)
}

/// Positions `(v − d − 1, f − d − 1)` of the non-pyramidal 2-neighborly
/// polytopes with at most `d + 9` facets. Simplices of every dimension sit
/// at the origin.
pub const CLASSIFICATION: &[(&str, i64, i64)] = &[
    ("P_{4,6,9}", 1, 4),
    ("P_{5,7,12}", 1, 6),
    ("P_{6,8,15}", 1, 8),
    ("P_{5,8,12}", 2, 6),
    ("P_{5,8,14}", 2, 8),
    ("P_{6,9,15}", 2, 8),
    ("P_{9,12,18}", 2, 8),
    ("P_{6,10,14}", 3, 7),
    ("P_{6,10,15}", 3, 8),
    ("P_{7,14,16}", 6, 8),
];

fn classification_point(e: &CatalogEntry) -> Option<(i64, i64)> {
    if e.v == e.d + 1 && e.f == e.d + 1 {
        return Some((0, 0));
    }
    CLASSIFICATION
        .iter()
        .find(|(n, _, _)| *n == e.name)
        .map(|&(_, x, y)| (x, y))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for EntryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS {}", self.name)
        } else {
            write!(f, "FAIL {}", self.name)?;
            for c in self.checks.iter().filter(|c| !c.passed) {
                write!(f, " [{}: {}]", c.name, c.detail)?;
            }
            Ok(())
        }
    }
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Runs every check on one entry. Checks after a hull failure are skipped.
pub fn verify_entry(e: &CatalogEntry) -> EntryReport {
    let mut checks = Vec::new();
    let shape = e.name.strip_prefix("P_{").and_then(|s| s.strip_suffix('}'));
    if let Some(shape) = shape {
        let named: Vec<Option<usize>> = shape.split(',').map(|x| x.parse().ok()).collect();
        let ok = named == vec![Some(e.d), Some(e.v), Some(e.f)];
        checks.push(check("name", ok, format!("name {} vs header ({}, {}, {})", e.name, e.d, e.v, e.f)));
    }
    checks.push(check(
        "point-count",
        e.points.len() == e.v,
        format!("{} points, expected {}", e.points.len(), e.v),
    ));
    let adim = affine_dim(&e.points);
    match &adim {
        Ok(a) => checks.push(check("affine-dim", *a == e.d, format!("affine dimension {a}, expected {}", e.d))),
        Err(err) => checks.push(check("affine-dim", false, err.to_string())),
    }
    let m = match e.incidence() {
        Ok(m) => m,
        Err(err) => {
            checks.push(check("hull", false, err.to_string()));
            return EntryReport {
                name: e.name.clone(),
                checks,
            };
        }
    };
    checks.push(check("facets", m.rows() == e.f, format!("{} facets, expected {}", m.rows(), e.f)));
    checks.push(check("vertices", m.cols() == e.v, format!("{} vertices, expected {}", m.cols(), e.v)));
    match build_poset(&m) {
        Ok(p) => {
            let ok = adim.as_ref().is_ok_and(|&a| p.dim() == a as i32) && p.dim() == e.d as i32;
            checks.push(check("lattice-dim", ok, format!("lattice dimension {}, expected {}", p.dim(), e.d)));
        }
        Err(err) => checks.push(check("lattice-dim", false, err.to_string())),
    }
    checks.push(check("two-neighborly", is_two_neighborly(&m), "some vertex pair is not an edge"));
    let d = e.d as i64;
    let got = (m.cols() as i64 - d - 1, m.rows() as i64 - d - 1);
    match classification_point(e) {
        Some(want) => checks.push(check(
            "classification",
            got == want,
            format!("point {got:?}, expected {want:?}"),
        )),
        None => checks.push(check("classification", false, format!("{} is not a listed type", e.name))),
    }
    EntryReport {
        name: e.name.clone(),
        checks,
    }
}

pub fn verify_catalog(entries: &[CatalogEntry]) -> Vec<EntryReport> {
    entries.iter().map(verify_entry).collect()
}
