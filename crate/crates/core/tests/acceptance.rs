//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
//! failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use neighborly_core::canonical::{canonical_key, CanonicalKey, FacetIndex};
use neighborly_core::fixtures;
use neighborly_core::gale::{enumerate_gale_pairs, enumerate_minimal_diagrams, for_each_diagram};
use neighborly_core::hull::verify_catalog;
use neighborly_core::incmat::{get_facet, is_two_neighborly, pyramid, IncidenceMatrix};
use neighborly_core::lattice::build_poset;
use neighborly_core::search::campaign::Campaign;
use neighborly_core::search::extend::complete_all_ridges;
use neighborly_core::search::{run, SearchOptions};
use neighborly_core::{find_matrices, ReducedGaleDiagram};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn campaign_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/campaigns").join(format!("{name}.txt"))
}

/// A result of a campaign with the vertex count of the run that found it.
struct Found {
    matrix: IncidenceMatrix,
    vertices: usize,
}

/// Runs every run of a bundled campaign to completion.
fn run_campaign(name: &str) -> Result<BTreeMap<CanonicalKey, Found>, String> {
    let campaign = Campaign::load(&campaign_path(name)).map_err(|e| e.to_string())?;
    let runs = campaign.runs().map_err(|e| e.to_string())?;
    let index = FacetIndex::build(&campaign.facet_list).map_err(|e| e.to_string())?;
    let mut out = BTreeMap::new();
    for spec in &runs {
        let r = run(spec, &index, &SearchOptions::default(), 0).map_err(|e| e.to_string())?;
        ensure(r.completed(), format!("run at {} vertices stopped early", spec.vrt))?;
        for (key, matrix) in r.results {
            out.entry(key).or_insert(Found {
                matrix,
                vertices: spec.vrt,
            });
        }
    }
    Ok(out)
}

fn key_of(name: &str) -> CanonicalKey {
    canonical_key(&fixtures::matrix(name))
}

fn pyramid_key(name: &str) -> CanonicalKey {
    canonical_key(&pyramid(&fixtures::matrix(name)).unwrap())
}

fn describe(found: &BTreeMap<CanonicalKey, Found>) -> String {
    let parts: Vec<String> = found
        .values()
        .map(|f| format!("{}x{}@{}v", f.matrix.rows(), f.matrix.cols(), f.vertices))
        .collect();
    format!("{} result(s) [{}]", found.len(), parts.join(", "))
}

fn c1_catalog() -> Outcome {
    let entries = fixtures::catalog();
    let reports = verify_catalog(&entries);
    ensure(reports.len() == 11, format!("{} entries", reports.len()))?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.to_string()).collect();
    ensure(failed.is_empty(), failed.join("; "))?;
    Ok("11 entries, (d, v, f), 2-neighborliness and lattice dimension all match".into())
}

fn c2_gale_pairs() -> Outcome {
    let got = enumerate_gale_pairs(7);
    ensure(got == vec![(3, 3), (3, 4), (3, 5)], format!("{got:?}"))?;
    Ok(format!("{got:?}"))
}

fn c3_minimal_diagrams() -> Outcome {
    let want: Vec<(ReducedGaleDiagram, u64)> = [
        (vec![3, 3, 3, 3], 18),
        (vec![1, 2, 1, 2, 1, 2], 15),
        (vec![1; 8], 12),
        (vec![0, 1, 1, 1, 0, 1, 1, 1, 1, 1], 14),
    ]
    .into_iter()
    .map(|(l, f)| (ReducedGaleDiagram::from_labels(&l).unwrap().canonical(), f))
    .collect();
    let got = enumerate_minimal_diagrams(3, 7, Some(9));
    let got_set: BTreeSet<_> = got.iter().cloned().collect();
    let want_set: BTreeSet<_> = want.iter().map(|(d, _)| d.clone()).collect();
    ensure(got.len() == 4 && got_set == want_set, format!("got {}", got.len()))?;
    for (d, f) in &want {
        ensure(d.count_cofacets() == *f, format!("{d}: {} cofacets", d.count_cofacets()))?;
    }
    let all = enumerate_minimal_diagrams(3, 7, None).len();
    Ok(format!("4 diagrams, cofacets 18, 15, 12, 14 ({all} minimal diagrams before the d+9 facet bound)"))
}

fn c4_lemma1() -> Outcome {
    let (mut diagrams, mut decrements) = (0, 0);
    let mut worst = i64::MAX;
    for n in 2..=5 {
        let mut bad = None;
        for_each_diagram(n, 3, false, |d| {
            diagrams += 1;
            for i in 0..2 * n {
                if let Some(delta) = d.lemma1_delta(i) {
                    decrements += 1;
                    worst = worst.min(delta);
                    if delta < 3 && bad.is_none() {
                        bad = Some(format!("{d} position {i}: {delta}"));
                    }
                }
            }
        });
        if let Some(b) = bad {
            return Err(b);
        }
    }
    let third = ReducedGaleDiagram::from_labels(&[1; 8]).unwrap();
    let gains: Vec<i64> = (0..8).map(|i| third.add_point_delta(Some(i)).unwrap()).collect();
    ensure(gains.iter().all(|&g| g >= 4), format!("gains {gains:?}"))?;
    Ok(format!(
        "{diagrams} diagrams, {decrements} decrements, least drop {worst}; increments on (1,...,1) gain {}",
        gains.iter().min().unwrap()
    ))
}

fn c5_fig6() -> Outcome {
    let m = fixtures::fig6();
    let p = build_poset(&m).map_err(|e| e.to_string())?;
    ensure(p.dim() == 5, format!("dim {}", p.dim()))?;
    ensure(m.cols() == 9 && m.rows() == 9, "shape")?;
    ensure(p.is_k_simplicial(2), "not 2-simplicial")?;
    ensure(p.is_k_simple(2), "not 2-simple")?;
    ensure(!is_two_neighborly(&m), "2-neighborly")?;
    Ok("dim 5, 9 vertices, 9 facets, 2-simplicial, 2-simple, not 2-neighborly".into())
}

fn c6_d5() -> Outcome {
    let found = run_campaign("d5_v7_f10")?;
    let want = BTreeSet::from([pyramid_key("P_{4,6,9}")]);
    ensure(found.keys().cloned().collect::<BTreeSet<_>>() == want, describe(&found))?;
    Ok(format!("{}: pyramid over P_{{4,6,9}}", describe(&found)))
}

fn c7_d6() -> Outcome {
    let found = run_campaign("d6_v10_f15")?;
    let want = BTreeSet::from([key_of("P_{6,10,14}"), key_of("P_{6,10,15}")]);
    ensure(found.keys().cloned().collect::<BTreeSet<_>>() == want, describe(&found))?;
    ensure(found.values().all(|f| f.vertices == 10), describe(&found))?;
    Ok(format!("{}: P_{{6,10,14}} and P_{{6,10,15}}", describe(&found)))
}

fn c8_d7() -> Outcome {
    let a = run_campaign("d7_p6915")?;
    let want = BTreeSet::from([pyramid_key("P_{6,9,15}")]);
    ensure(a.keys().cloned().collect::<BTreeSet<_>>() == want, format!("P_{{6,9,15}}: {}", describe(&a)))?;

    let p71416 = key_of("P_{7,14,16}");
    let b = run_campaign("d7_p61014")?;
    let want = BTreeSet::from([pyramid_key("P_{6,10,14}"), p71416.clone()]);
    ensure(b.keys().cloned().collect::<BTreeSet<_>>() == want, format!("P_{{6,10,14}}: {}", describe(&b)))?;
    ensure(b[&p71416].vertices == 14, "P_{7,14,16} vertex count")?;

    let c = run_campaign("d7_p61015")?;
    let want = BTreeSet::from([pyramid_key("P_{6,10,15}")]);
    ensure(c.keys().cloned().collect::<BTreeSet<_>>() == want, format!("P_{{6,10,15}}: {}", describe(&c)))?;
    Ok(format!(
        "P_{{6,9,15}}: {}; P_{{6,10,14}}: {}; P_{{6,10,15}}: {}",
        describe(&a),
        describe(&b),
        describe(&c)
    ))
}

fn c9_d8() -> Outcome {
    let base = fixtures::matrix("P_{7,14,16}");
    let classes = complete_all_ridges(&base, 10, &base);
    ensure(classes.len() == 1, format!("{} completion classes", classes.len()))?;
    let (key, group) = classes.iter().next().unwrap();
    ensure(*key == canonical_key(&fixtures::fig10()), "completion differs from fig10")?;
    let campaign = Campaign::load(&campaign_path("d8_p71416")).map_err(|e| e.to_string())?;
    let index = FacetIndex::build(&campaign.facet_list).map_err(|e| e.to_string())?;
    let c = &group[0];
    let m = &c.matrix;
    let mut rejected = Vec::new();
    for i in (0..16).filter(|&i| i != c.ridge_row && m.row(i).count_ones() == 14) {
        let f = get_facet(m, i).map_err(|e| e.to_string())?;
        ensure(!index.contains(&f), format!("row {i} extracts to an allowed facet"))?;
        rejected.push(format!("{}x{}", f.rows(), f.cols()));
    }
    ensure(!rejected.is_empty() && rejected.iter().all(|s| s == "15x14"), format!("{rejected:?}"))?;
    let found = run_campaign("d8_p71416")?;
    let want = BTreeSet::from([pyramid_key("P_{7,14,16}")]);
    ensure(found.keys().cloned().collect::<BTreeSet<_>>() == want, describe(&found))?;
    Ok(format!(
        "unique completion over {} ridges equals fig10; its 14-vertex rows extract to {}; engine: {}",
        group.len(),
        rejected.join(", "),
        describe(&found)
    ))
}

fn c10_d10() -> Outcome {
    let found = run_campaign("d10_p91218")?;
    let want = BTreeSet::from([pyramid_key("P_{9,12,18}")]);
    ensure(found.keys().cloned().collect::<BTreeSet<_>>() == want, describe(&found))?;
    Ok(format!("{}: pyramid over P_{{9,12,18}}", describe(&found)))
}

fn c11_oracle() -> Outcome {
    let specs = common::micro_specs();
    let mut nonempty = 0;
    for spec in &specs {
        let engine: BTreeSet<_> = find_matrices(spec).map_err(|e| e.to_string())?.iter().map(canonical_key).collect();
        let brute = common::brute_force(spec);
        ensure(
            engine == brute,
            format!(
                "dim {} base {}x{} vrt {} fct {} minfv {}: engine {} brute {}",
                spec.dim,
                spec.base_facet.rows(),
                spec.base_facet.cols(),
                spec.vrt,
                spec.fct,
                spec.minfv,
                engine.len(),
                brute.len()
            ),
        )?;
        nonempty += usize::from(!engine.is_empty());
    }
    Ok(format!("{} specs agree ({nonempty} with results)", specs.len()))
}

fn c12_canonical() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut by_shape: BTreeMap<(usize, usize), Vec<(String, CanonicalKey)>> = BTreeMap::new();
    for e in fixtures::catalog() {
        let m = e.incidence().map_err(|err| err.to_string())?;
        let key = canonical_key(&m);
        let mut rows: Vec<usize> = (0..m.rows()).collect();
        let mut cols: Vec<usize> = (0..m.cols()).collect();
        for _ in 0..1000 {
            rows.shuffle(&mut rng);
            cols.shuffle(&mut rng);
            ensure(canonical_key(&m.permuted(&rows, &cols)) == key, format!("{} shuffle", e.name))?;
        }
        by_shape.entry((m.rows(), m.cols())).or_default().push((e.name.clone(), key));
        // pyramids over distinct non-pyramidal bases are non-isomorphic and
        // collide in shape with the catalog, e.g. P_{5,8,14}^1 with P_{6,9,15}
        let mut p = m;
        for k in 1..=2 {
            p = pyramid(&p).map_err(|err| err.to_string())?;
            by_shape.entry((p.rows(), p.cols())).or_default().push((format!("{}^{k}", e.name), canonical_key(&p)));
        }
    }
    let mut pairs = 0;
    for group in by_shape.values() {
        for (a, (na, ka)) in group.iter().enumerate() {
            for (nb, kb) in &group[a + 1..] {
                pairs += 1;
                ensure(ka != kb, format!("{na} and {nb} share a key"))?;
            }
        }
    }
    Ok(format!("11 x 1000 shuffles keep their keys; {pairs} equal-shape pair(s) distinct"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("catalog verification", c1_catalog),
        ("Gale pairs, excess 7", c2_gale_pairs),
        ("minimal Gale diagrams", c3_minimal_diagrams),
        ("decrement and increment deltas", c4_lemma1),
        ("fig6 lattice", c5_fig6),
        ("5-dim campaign", c6_d5),
        ("6-dim campaign", c7_d6),
        ("7-dim campaigns", c8_d7),
        ("8-dim ridge completion", c9_d8),
        ("10-dim campaign", c10_d10),
        ("brute-force oracle", c11_oracle),
        ("canonical invariance", c12_canonical),
    ];
    let only: Option<Vec<usize>> = std::env::var("NEIGHBORLY_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let n = n + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
