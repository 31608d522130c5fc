//! An exhaustive reference enumerator for small campaign specs.
//!
//! It shares no search logic with the engine: matrices are built as sets of
//! distinct rows, one of which is the base facet on the first columns, and
//! every candidate is filtered by the defining properties alone.

#![allow(dead_code)]

use std::collections::BTreeSet;

use neighborly_core::canonical::{canonical_key, CanonicalKey};
use neighborly_core::incmat::{bit, get_facet, is_subset, is_two_neighborly, low_mask, validate, IncidenceMatrix};
use neighborly_core::CampaignSpec;

/// Canonical keys of every matrix satisfying `spec`.
pub fn brute_force(spec: &CampaignSpec) -> BTreeSet<CanonicalKey> {
    let n = spec.vrt;
    let base_row = low_mask(spec.base_facet.cols());
    let sizes: BTreeSet<u32> = spec.facet_list.iter().map(|m| m.cols() as u32).collect();
    let allowed: BTreeSet<CanonicalKey> = spec.facet_list.iter().map(canonical_key).collect();
    let base_key = canonical_key(&spec.base_facet);
    let candidates: Vec<u64> = (0u64..1 << n)
        .map(|w| w << (64 - n))
        .filter(|&w| w != base_row && sizes.contains(&w.count_ones()))
        .collect();

    let mut out = BTreeSet::new();
    let mut rows = vec![base_row];
    let mut counts = vec![0u32; n];
    for j in 0..spec.base_facet.cols() {
        counts[j] = 1;
    }
    let mut leaf = |rows: &[u64]| {
        let m = IncidenceMatrix::new(n, rows.to_vec()).expect("shape");
        if !validate(&m, spec.dim).is_empty() || !is_two_neighborly(&m) {
            return;
        }
        if (0..n).any(|j| m.column(j).count_ones() < spec.minfv) {
            return;
        }
        if canonical_key(&get_facet(&m, 0).expect("row")) != base_key {
            return;
        }
        if (1..m.rows()).all(|i| allowed.contains(&canonical_key(&get_facet(&m, i).expect("row")))) {
            out.insert(canonical_key(&m));
        }
    };
    choose(&candidates, 0, spec.fct - 1, spec.minfv, &mut rows, &mut counts, &mut leaf);
    out
}

fn choose(
    candidates: &[u64],
    from: usize,
    left: usize,
    minfv: u32,
    rows: &mut Vec<u64>,
    counts: &mut Vec<u32>,
    leaf: &mut dyn FnMut(&[u64]),
) {
    if counts.iter().any(|&c| c + (left as u32) < minfv) {
        return;
    }
    if left == 0 {
        leaf(rows);
        return;
    }
    for at in from..candidates.len() {
        if candidates.len() - at < left {
            break;
        }
        let w = candidates[at];
        if rows.iter().any(|&r| is_subset(r, w) || is_subset(w, r)) {
            continue;
        }
        rows.push(w);
        for (j, c) in counts.iter_mut().enumerate() {
            if w & bit(j) != 0 {
                *c += 1;
            }
        }
        choose(candidates, at + 1, left - 1, minfv, rows, counts, leaf);
        for (j, c) in counts.iter_mut().enumerate() {
            if w & bit(j) != 0 {
                *c -= 1;
            }
        }
        rows.pop();
    }
}

/// Every small spec: dimension 4 around a tetrahedron and dimension 5
/// around either of its facet types, all vertex and facet counts up to 7
/// and 10, with the trivial and the default vertex-degree bound.
pub fn micro_specs() -> Vec<CampaignSpec> {
    let s3 = IncidenceMatrix::simplex(4);
    let s4 = IncidenceMatrix::simplex(5);
    let p469 = neighborly_core::fixtures::matrix("P_{4,6,9}");
    let mut out = Vec::new();
    let families = [
        (4, vec![s3.clone()], vec![s3]),
        (5, vec![s4.clone(), p469.clone()], vec![s4, p469]),
    ];
    for (dim, list, bases) in families {
        for base in &bases {
            for vrt in base.cols() + 1..=7 {
                for fct in base.rows() + 1..=10 {
                    let default = neighborly_core::search::default_minfv(dim, vrt);
                    let mut bounds = vec![dim, default];
                    bounds.dedup();
                    for minfv in bounds {
                        out.push(CampaignSpec {
                            facet_list: list.clone(),
                            base_facet: base.clone(),
                            dim,
                            vrt,
                            fct,
                            minfv,
                        });
                    }
                }
            }
        }
    }
    out
}
