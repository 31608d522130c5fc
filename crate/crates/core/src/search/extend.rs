//! Completion of a base facet across one ridge.
//!
//! Let `B` be the base facet of a polytope `P` and `r` a row of `B` (a ridge
//! of `P` on `B`). The second facet `G` through that ridge contains the
//! ridge's vertices plus some new vertices outside `B`. When `G` is known to
//! be of type `T`, the facets of `G` are: the base itself (meeting `G` in
//! exactly the ridge) and the traces of the other facets of `P`. So the
//! rows of `B` other than `r`, restricted to the ridge, together with the
//! all-ones ridge row, must extend by `cols(T) - |r|` new columns to a copy
//! of `T`. This module enumerates those extensions.

use std::collections::{BTreeMap, BTreeSet};

use crate::canonical::{canonical_key, CanonicalKey};
use crate::incmat::{bit, compress, low_mask, positions, IncidenceMatrix};

/// One completion of a base facet across a ridge.
#[derive(Debug, Clone)]
pub struct RidgeCompletion {
    /// Row of the base facet holding the ridge.
    pub ridge_row: usize,
    /// Base rows, then the base facet's own row; base columns, then the new
    /// vertices. The new vertices lie on the ridge row and every row whose
    /// trace on the second facet contains them.
    pub matrix: IncidenceMatrix,
}

/// Column words (over `k` rows) for each column of `m`.
fn columns(m: &IncidenceMatrix) -> Vec<u64> {
    m.column_words()
}

/// All ways of matching `k` (rows x `a` cols) into `t` (rows x `b` cols)
/// with a row bijection and a column injection. Calls `visit(sigma, pi)`
/// with `sigma[i]` the row of `t` matched to row `i` of `k`, and `pi[j]` the
/// column of `t` matched to column `j`.
fn embeddings(k: &IncidenceMatrix, t: &IncidenceMatrix, visit: &mut dyn FnMut(&[usize], &[usize])) {
    if k.rows() != t.rows() || k.cols() > t.cols() {
        return;
    }
    let kc = columns(k);
    let tc = columns(t);
    let rows = k.rows();
    let mut pi = Vec::with_capacity(k.cols());
    let mut used = 0u64;
    // prefix signatures: bit j of kp[i] is k[i][j], bit j of tp[s] is t[s][pi[j]]
    let mut kp = vec![0u64; rows];
    let mut tp = vec![0u64; rows];
    embed_rec(&kc, &tc, &mut pi, &mut used, &mut kp, &mut tp, visit);
}

fn same_multiset(a: &[u64], b: &[u64]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

fn embed_rec(
    kc: &[u64],
    tc: &[u64],
    pi: &mut Vec<usize>,
    used: &mut u64,
    kp: &mut [u64],
    tp: &mut [u64],
    visit: &mut dyn FnMut(&[usize], &[usize]),
) {
    let j = pi.len();
    if j == kc.len() {
        emit_row_bijections(kp, tp, pi, visit);
        return;
    }
    for (c, &col) in tc.iter().enumerate() {
        if *used & bit(c) != 0 || col.count_ones() != kc[j].count_ones() {
            continue;
        }
        for i in positions(kc[j]) {
            kp[i] |= bit(j);
        }
        for s in positions(col) {
            tp[s] |= bit(j);
        }
        if same_multiset(kp, tp) {
            pi.push(c);
            *used |= bit(c);
            embed_rec(kc, tc, pi, used, kp, tp, visit);
            *used &= !bit(c);
            pi.pop();
        }
        for i in positions(kc[j]) {
            kp[i] &= !bit(j);
        }
        for s in positions(col) {
            tp[s] &= !bit(j);
        }
    }
}

/// Every row bijection carrying each signature of `kp` to an equal one of
/// `tp`.
fn emit_row_bijections(kp: &[u64], tp: &[u64], pi: &[usize], visit: &mut dyn FnMut(&[usize], &[usize])) {
    let mut classes: BTreeMap<u64, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, &w) in kp.iter().enumerate() {
        classes.entry(w).or_default().0.push(i);
    }
    for (s, &w) in tp.iter().enumerate() {
        classes.entry(w).or_default().1.push(s);
    }
    let classes: Vec<_> = classes.into_values().collect();
    let mut sigma = vec![usize::MAX; kp.len()];
    assign_classes(&classes, 0, &mut sigma, pi, visit);
}

fn assign_classes(
    classes: &[(Vec<usize>, Vec<usize>)],
    at: usize,
    sigma: &mut Vec<usize>,
    pi: &[usize],
    visit: &mut dyn FnMut(&[usize], &[usize]),
) {
    let Some((from, to)) = classes.get(at) else {
        visit(sigma, pi);
        return;
    };
    let mut order = to.clone();
    permute(&mut order, 0, &mut |perm| {
        for (&i, &s) in from.iter().zip(perm) {
            sigma[i] = s;
        }
        assign_classes(classes, at + 1, sigma, pi, visit);
    });
}

fn permute(v: &mut Vec<usize>, at: usize, f: &mut dyn FnMut(&[usize])) {
    if at == v.len() {
        f(v);
        return;
    }
    for i in at..v.len() {
        v.swap(at, i);
        permute(v, at + 1, f);
        v.swap(at, i);
    }
}

/// Completions of `base` across ridge row `r` whose second facet is of type
/// `target`, one per set of new columns (their order is immaterial).
pub fn complete_ridge(base: &IncidenceMatrix, r: usize, target: &IncidenceMatrix) -> Vec<RidgeCompletion> {
    let ridge = base.row(r);
    let a = ridge.count_ones() as usize;
    let (kb, nb) = (base.rows(), base.cols());
    let extra = match target.cols().checked_sub(a) {
        Some(e) if e > 0 && nb + e <= 64 => e,
        _ => return Vec::new(),
    };
    // trace block: rows of the base other than r, then the base row itself
    let mut trace: Vec<u64> = (0..kb).filter(|&i| i != r).map(|i| compress(base.row(i), ridge)).collect();
    trace.push(low_mask(a));
    let Ok(k) = IncidenceMatrix::new(a, trace) else {
        return Vec::new();
    };
    if k.rows() != target.rows() {
        return Vec::new();
    }

    let tcols = columns(target);
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    embeddings(&k, target, &mut |sigma, pi| {
        let rest: Vec<usize> = (0..target.cols()).filter(|c| !pi.contains(c)).collect();
        // new column words over the trace rows
        let mut news: Vec<u64> = rest
            .iter()
            .map(|&c| {
                sigma
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| tcols[c] & bit(s) != 0)
                    .fold(0u64, |w, (i, _)| w | bit(i))
            })
            .collect();
        // the base row never contains a new vertex
        if news.iter().any(|w| w & bit(kb - 1) != 0) {
            return;
        }
        news.sort_unstable();
        seen.insert(news);
    });

    seen.into_iter()
        .map(|news| {
            let mut rows = Vec::with_capacity(kb + 1);
            let mut t = 0;
            for i in 0..kb {
                let mut w = base.row(i);
                for (e, &col) in news.iter().enumerate() {
                    let on = if i == r { true } else { col & bit(t) != 0 };
                    if on {
                        w |= bit(nb + e);
                    }
                }
                if i != r {
                    t += 1;
                }
                rows.push(w);
            }
            rows.push(low_mask(nb));
            RidgeCompletion {
                ridge_row: r,
                matrix: IncidenceMatrix::new(nb + extra, rows).expect("width checked"),
            }
        })
        .collect()
}

/// Completions over every ridge row with `ridge_ones` vertices, grouped by
/// canonical key of the completed matrix.
pub fn complete_all_ridges(
    base: &IncidenceMatrix,
    ridge_ones: u32,
    target: &IncidenceMatrix,
) -> BTreeMap<CanonicalKey, Vec<RidgeCompletion>> {
    let mut out: BTreeMap<CanonicalKey, Vec<RidgeCompletion>> = BTreeMap::new();
    for r in (0..base.rows()).filter(|&r| base.row(r).count_ones() == ridge_ones) {
        for c in complete_ridge(base, r, target) {
            out.entry(canonical_key(&c.matrix)).or_default().push(c);
        }
    }
    out
}
