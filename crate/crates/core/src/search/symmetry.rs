//! Column automorphisms of the base facet and the orbit tests built on them.
//!
//! An automorphism is a column permutation `p` that maps the set of rows to
//! itself, reading a word `w` as `w'[j] = w[p[j]]`. Start matrices related by
//! an automorphism are isomorphic, and so are the searches below them; the
//! engine only expands the lexicographically least member of each orbit.

use crate::incmat::{bit, positions, IncidenceMatrix};

/// The word with bit `j` taken from bit `perm[j]` of `w`.
pub fn permute_word(w: u64, perm: &[usize]) -> u64 {
    perm.iter().enumerate().filter(|&(_, &p)| w & bit(p) != 0).fold(0, |acc, (j, _)| acc | bit(j))
}

/// Every column permutation of `m` that maps its rows onto its rows,
/// identity first.
pub fn column_automorphisms(m: &IncidenceMatrix) -> Vec<Vec<usize>> {
    let rows = m.row_words();
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(m.cols());
    extend(rows, m.cols(), &mut perm, &mut out);
    out
}

/// Extends a partial permutation while the rows restricted to the first
/// `perm.len()` columns agree as multisets.
fn extend(rows: &[u64], n: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let k = perm.len();
    let prefix = if k == 0 { 0 } else { !0u64 << (64 - k) };
    let mut image: Vec<u64> = rows.iter().map(|&r| permute_word(r, perm)).collect();
    let mut own: Vec<u64> = rows.iter().map(|&r| r & prefix).collect();
    image.sort_unstable();
    own.sort_unstable();
    if image != own {
        return;
    }
    if k == n {
        out.push(perm.clone());
        return;
    }
    for j in 0..n {
        if !perm.contains(&j) {
            perm.push(j);
            extend(rows, n, perm, out);
            perm.pop();
        }
    }
}

/// The action of the base automorphisms on a sorted list of words that the
/// automorphisms permute (the feasible rows), as index maps.
pub fn index_maps(autos: &[Vec<usize>], words: &[u64]) -> Vec<Vec<usize>> {
    autos
        .iter()
        .map(|p| {
            words
                .iter()
                .map(|&w| {
                    let img = permute_word(w, p);
                    words.binary_search(&img).expect("automorphisms permute the feasible rows")
                })
                .collect()
        })
        .collect()
}

/// Whether the sorted multiset `subset` is no larger than any of its images.
pub fn is_least_in_orbit(subset: &[usize], maps: &[Vec<usize>], buf: &mut Vec<usize>) -> bool {
    maps.iter().all(|map| {
        buf.clear();
        buf.extend(subset.iter().map(|&i| map[i]));
        buf.sort_unstable();
        subset <= &buf[..]
    })
}

/// Row permutations of the start matrix (rows of `f`, then `subset`, then
/// the all-ones row) induced by the automorphisms that fix `subset`.
/// Entry `i` of each map is the image of row `i`.
pub fn start_stabilizer(
    f: &IncidenceMatrix,
    autos: &[Vec<usize>],
    maps: &[Vec<usize>],
    subset: &[usize],
) -> Vec<Vec<usize>> {
    let fr = f.row_words();
    let nr = fr.len();
    let mut out = Vec::new();
    for (p, map) in autos.iter().zip(maps) {
        let mut img: Vec<usize> = subset.iter().map(|&i| map[i]).collect();
        let mut sorted = img.clone();
        sorted.sort_unstable();
        if sorted != subset {
            continue;
        }
        let mut rho: Vec<usize> = fr
            .iter()
            .map(|&r| {
                let w = permute_word(r, p);
                fr.iter().position(|&x| x == w).expect("rows map to rows")
            })
            .collect();
        // equal extra rows are matched in order
        let mut taken = vec![false; subset.len()];
        for x in img.iter_mut() {
            let q = (0..subset.len()).find(|&q| !taken[q] && subset[q] == *x).expect("image is the subset");
            taken[q] = true;
            *x = nr + q;
        }
        rho.extend(img);
        rho.push(nr + subset.len());
        out.push(rho);
    }
    out
}

/// The column word with row `i` moved to row `pi[i]`.
pub fn permute_rows(c: u64, pi: &[usize]) -> u64 {
    positions(c).fold(0, |w, i| w | bit(pi[i]))
}
