//! Face lattices of incidence matrices.
//!
//! Faces are the closed vertex sets of the incidence relation: intersections
//! of facet rows, together with the full vertex set (the empty intersection)
//! and the empty face. Dimensions are longest-chain ranks.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::incmat::{bit, is_subset, positions, IncidenceMatrix};

/// Default bound on the number of faces `build_poset` will materialize.
pub const DEFAULT_FACE_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("face lattice exceeds {limit} faces")]
    TooManyFaces { limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    /// Column positions of the face's vertices.
    pub vertices: u64,
    /// Row positions of the facets containing the face. Empty for the full
    /// face.
    pub facets: u64,
    pub dim: i32,
}

/// The face lattice, with faces sorted by dimension and then by vertex list.
#[derive(Debug, Clone)]
pub struct FacePoset {
    faces: Vec<Face>,
    vertices: usize,
    facets: usize,
}

/// The vertices lying on every facet that contains all of `set`; the full
/// vertex set when no facet contains `set`.
pub fn closure(m: &IncidenceMatrix, set: u64) -> u64 {
    m.row_words()
        .iter()
        .filter(|&&r| is_subset(set, r))
        .fold(m.column_mask(), |acc, &r| acc & r)
}

pub fn build_poset(m: &IncidenceMatrix) -> Result<FacePoset, LatticeError> {
    build_poset_with_limit(m, DEFAULT_FACE_LIMIT)
}

pub fn build_poset_with_limit(m: &IncidenceMatrix, limit: usize) -> Result<FacePoset, LatticeError> {
    let full = m.column_mask();
    let mut seen: HashSet<u64> = HashSet::from([full, 0]);
    let mut list = vec![full];
    for &r in m.row_words() {
        let mut fresh = Vec::new();
        for &f in &list {
            let meet = f & r;
            if seen.insert(meet) {
                fresh.push(meet);
            }
        }
        list.extend(fresh);
        if seen.len() > limit {
            return Err(LatticeError::TooManyFaces { limit });
        }
    }
    let mut sets: Vec<u64> = seen.into_iter().collect();
    sets.sort_unstable_by_key(|&s| (s.count_ones(), std::cmp::Reverse(s)));

    let mut dims = vec![-1i32; sets.len()];
    for a in 1..sets.len() {
        let s = sets[a];
        dims[a] = (0..a)
            .filter(|&b| sets[b] != s && is_subset(sets[b], s))
            .map(|b| dims[b])
            .max()
            .map_or(-1, |d| d + 1);
    }

    let mut faces: Vec<Face> = sets
        .iter()
        .zip(&dims)
        .map(|(&vertices, &dim)| Face {
            vertices,
            facets: if vertices == full {
                0
            } else {
                m.row_words()
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| is_subset(vertices, r))
                    .fold(0u64, |w, (i, _)| w | bit(i))
            },
            dim,
        })
        .collect();
    faces.sort_by_key(|f| (f.dim, std::cmp::Reverse(f.vertices)));
    Ok(FacePoset {
        faces,
        vertices: m.cols(),
        facets: m.rows(),
    })
}

impl FacePoset {
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Combinatorial dimension: the rank of the full face.
    pub fn dim(&self) -> i32 {
        self.faces.last().map_or(-1, |f| f.dim)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn facet_count(&self) -> usize {
        self.facets
    }

    pub fn faces_of_dim(&self, k: i32) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == k)
    }

    /// Face counts for dimensions `0..dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.dim()).map(|k| self.faces_of_dim(k).count()).collect()
    }

    /// Every `k`-face has exactly `k + 1` vertices.
    pub fn is_k_simplicial(&self, k: i32) -> bool {
        self.faces_of_dim(k)
            .all(|f| f.vertices.count_ones() as i32 == k + 1)
    }

    /// Every `(dim − 1 − k)`-face lies in exactly `k + 1` facets.
    pub fn is_k_simple(&self, k: i32) -> bool {
        self.faces_of_dim(self.dim() - 1 - k)
            .all(|f| f.facets.count_ones() as i32 == k + 1)
    }

    /// One line per face, `dim <k>: <vertex indices>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for f in &self.faces {
            let _ = write!(out, "dim {}:", f.dim);
            for v in positions(f.vertices) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::incmat::{is_two_neighborly, low_mask};

    #[test]
    fn simplex_lattice_is_boolean() {
        let p = build_poset(&IncidenceMatrix::simplex(5)).unwrap();
        assert_eq!(p.faces().len(), 32);
        assert!(p.faces().iter().all(|f| f.dim == f.vertices.count_ones() as i32 - 1));
        assert_eq!(p.dim(), 4);
        for k in 0..4 {
            assert!(p.is_k_simplicial(k));
            assert!(p.is_k_simple(k));
        }
    }

    #[test]
    fn closure_basics() {
        let s = IncidenceMatrix::simplex(6);
        assert_eq!(closure(&s, bit(0) | bit(1)), bit(0) | bit(1));
        assert_eq!(closure(&s, 0), 0);
        assert_eq!(closure(&s, low_mask(6)), low_mask(6));
        let fig6 = fixtures::fig6();
        let fat = (0..9)
            .flat_map(|u| (u + 1..9).map(move |v| (u, v)))
            .any(|(u, v)| closure(&fig6, bit(u) | bit(v)).count_ones() >= 3);
        assert!(fat);
    }

    #[test]
    fn fig6_lattice_properties() {
        let p = build_poset(&fixtures::fig6()).unwrap();
        assert_eq!(p.dim(), 5);
        assert_eq!(p.f_vector()[0], 9);
        assert_eq!(p.f_vector()[4], 9);
        assert!(p.is_k_simplicial(2));
        assert!(p.is_k_simple(2));
    }

    #[test]
    fn p469_f_vector() {
        let p = build_poset(&fixtures::matrix("P_{4,6,9}")).unwrap();
        assert_eq!(p.dim(), 4);
        assert_eq!(p.f_vector(), vec![6, 15, 18, 9]);
        assert!(p.is_k_simplicial(3 - 1));
    }

    #[test]
    fn catalog_lattices_match_names_and_duality() {
        for e in fixtures::catalog() {
            let m = e.incidence().unwrap();
            let p = build_poset(&m).unwrap();
            assert_eq!(p.dim(), e.d as i32, "{}", e.name);
            assert_eq!(p.f_vector()[0], e.v, "{}", e.name);
            assert_eq!(p.f_vector()[e.d - 1], e.f, "{}", e.name);
            assert!(p.faces_of_dim(1).all(|f| f.vertices.count_ones() == 2));
            assert!(p
                .faces_of_dim(e.d as i32 - 2)
                .all(|f| f.facets.count_ones() == 2));
            let dual = build_poset(&m.transpose()).unwrap();
            assert_eq!(dual.dim(), p.dim());
            assert_eq!(dual.faces().len(), p.faces().len());
            for k in 0..p.dim() {
                assert_eq!(p.is_k_simple(k), dual.is_k_simplicial(k), "{} k={k}", e.name);
            }
            // matrix-level and lattice-level 2-neighborliness agree
            let pairs_closed = (0..m.cols())
                .flat_map(|u| (u + 1..m.cols()).map(move |v| bit(u) | bit(v)))
                .all(|s| closure(&m, s) == s);
            assert_eq!(pairs_closed, is_two_neighborly(&m), "{}", e.name);
        }
    }

    #[test]
    fn p5812_simple_vs_transpose() {
        let m = fixtures::matrix("P_{5,8,12}");
        let a = build_poset(&m).unwrap().is_k_simple(2);
        let b = build_poset(&m.transpose()).unwrap().is_k_simplicial(2);
        assert_eq!(a, b);
    }

    #[test]
    fn face_limit_is_enforced() {
        let err = build_poset_with_limit(&IncidenceMatrix::simplex(8), 10).unwrap_err();
        assert_eq!(err, LatticeError::TooManyFaces { limit: 10 });
    }

    #[test]
    fn dump_format() {
        let p = build_poset(&IncidenceMatrix::simplex(3)).unwrap();
        let dump = p.dump();
        assert!(dump.starts_with("dim -1:\n"));
        assert!(dump.contains("dim 0: 0\n"));
        assert!(dump.ends_with("dim 2: 0 1 2\n"));
    }
}
