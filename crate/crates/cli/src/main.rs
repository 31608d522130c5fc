use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use neighborly_core::canonical::canonical_key;
use neighborly_core::fixtures;
use neighborly_core::gale::{enumerate_gale_pairs, enumerate_minimal_diagrams};
use neighborly_core::hull::{parse_catalog, verify_catalog, CatalogEntry};
use neighborly_core::incmat::{format_matrices, get_facet, parse_matrices, pyramid_k, IncidenceMatrix};
use neighborly_core::lattice::build_poset;
use neighborly_core::search::campaign::{Campaign, Checkpoint};
use neighborly_core::search::extend::complete_all_ridges;
use neighborly_core::search::{run, Limits, SearchOptions};
use neighborly_core::{FacetIndex, ReducedGaleDiagram};

/// Enumeration and verification of 2-neighborly polytope combinatorics.
#[derive(Debug, Parser)]
#[command(name = "neighborly", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a polytope catalog against its (d, v, f) labels.
    Verify {
        /// Catalog file; the bundled catalog when omitted.
        catalog: Option<PathBuf>,
        /// Print the classification plot as TSV instead of the report.
        #[arg(long)]
        scatter: bool,
    },
    /// Gale-diagram computations for d+2 and d+3 vertices.
    Gale(GaleArgs),
    /// Run a search campaign.
    Enumerate(EnumerateArgs),
    /// Extract the facet in one row of a matrix.
    Facet {
        file: PathBuf,
        #[arg(long)]
        row: usize,
        /// Which matrix of the file, counting from 0.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Print the canonical key of each matrix in a file.
    Canon {
        file: PathBuf,
        /// Print canonical forms instead of keys.
        #[arg(long)]
        form: bool,
    },
    /// List the faces of a matrix, or only those of dimension K.
    Faces {
        file: PathBuf,
        #[arg(long)]
        k: Option<i32>,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Incidence matrices of catalog polytopes computed from coordinates.
    Hull {
        /// Catalog file; the bundled catalog when omitted.
        catalog: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Iterated pyramids over each matrix in a file.
    Pyramid {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Complete a base facet across its ridges by copies of a target facet.
    Complete {
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Vertex count of the ridges to complete.
        #[arg(long)]
        ridge_ones: u32,
        /// Allowed facet types, for judging the completed rows.
        #[arg(long, value_delimiter = ',')]
        facet_list: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "mode")]
struct GaleModes {
    /// 2-neighborly {m1, m-1} pairs with at most d + 2 + E facets.
    #[arg(long, value_name = "E")]
    excess: Option<u32>,
    /// Minimal 2-neighborly diagrams.
    #[arg(long)]
    minimal: bool,
    /// Cofacet count of a diagram, e.g. "n=3 mC=0 labels=1,2,1,2,1,2".
    #[arg(long, value_name = "DIAGRAM")]
    cofacets: Option<String>,
}

#[derive(Debug, Args)]
struct GaleArgs {
    #[command(flatten)]
    mode: GaleModes,
    #[arg(long, default_value_t = 3)]
    max_label: u32,
    #[arg(long, default_value_t = 7)]
    max_n: usize,
    /// Keep minimal diagrams with at most d + E cofacets.
    #[arg(long, value_name = "E", default_value_t = 9, conflicts_with = "any_excess")]
    max_excess: u32,
    /// Report minimal diagrams of every cofacet count.
    #[arg(long)]
    any_excess: bool,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    campaign: PathBuf,
    #[arg(long, env = "NEIGHBORLY_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Continue from a checkpoint written by an aborted run.
    #[arg(long, value_name = "CHECKPOINT")]
    resume: Option<PathBuf>,
    /// Where to write the checkpoint on abort.
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    max_seconds: Option<f64>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Outcome {
    Ok,
    Failed,
    Aborted,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_matrices(path: &Path) -> Result<Vec<IncidenceMatrix>> {
    parse_matrices(&read(path)?).with_context(|| format!("cannot parse {}", path.display()))
}

fn read_one(path: &Path, index: usize) -> Result<IncidenceMatrix> {
    let all = read_matrices(path)?;
    let n = all.len();
    all.into_iter()
        .nth(index)
        .with_context(|| format!("{} holds {n} matrices, no index {index}", path.display()))
}

fn read_catalog(path: Option<&Path>) -> Result<Vec<CatalogEntry>> {
    match path {
        Some(p) => parse_catalog(&read(p)?).with_context(|| format!("cannot parse {}", p.display())),
        None => Ok(fixtures::catalog()),
    }
}

fn cmd_verify(catalog: Option<&Path>, scatter: bool) -> Result<Outcome> {
    let entries = read_catalog(catalog)?;
    let reports = verify_catalog(&entries);
    if scatter {
        println!("v-d-1\tf-d-1\tname");
        for e in &entries {
            let (x, y) = e.excess();
            println!("{x}\t{y}\t{}", e.name);
        }
    } else {
        for r in &reports {
            println!("{r}");
        }
    }
    Ok(if reports.iter().all(|r| r.passed()) {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn cmd_gale(a: &GaleArgs) -> Result<Outcome> {
    if let Some(e) = a.mode.excess {
        for (p, q) in enumerate_gale_pairs(e) {
            println!("{{{p},{q}}}");
        }
    } else if a.mode.minimal {
        let bound = (!a.any_excess).then_some(a.max_excess);
        for d in enumerate_minimal_diagrams(a.max_label, a.max_n, bound) {
            let (dim, v, f, _) = d.profile();
            println!("{d} d={dim} v={v} f={f}");
        }
    } else if let Some(s) = &a.mode.cofacets {
        let d: ReducedGaleDiagram = s.parse().with_context(|| format!("bad diagram {s:?}"))?;
        if !d.is_valid() {
            bail!("{d} violates the diagram properties");
        }
        println!("{}", d.count_cofacets());
    }
    Ok(Outcome::Ok)
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<Outcome> {
    let campaign = Campaign::load(&a.campaign)?;
    let runs = campaign.runs()?;
    let index = FacetIndex::build(&campaign.facet_list)?;
    let mut results = BTreeMap::new();
    let (mut run_index, mut next_subset) = (0, 0);
    if let Some(path) = &a.resume {
        let ck = Checkpoint::load(path)?;
        if ck.campaign != campaign.name {
            bail!("checkpoint is for campaign {:?}, not {:?}", ck.campaign, campaign.name);
        }
        for m in ck.matrices()? {
            results.insert(canonical_key(&m), m);
        }
        (run_index, next_subset) = (ck.run_index, ck.next_subset);
    }

    let stop = Arc::new(AtomicBool::new(false));
    {
        let stop = stop.clone();
        // a second handler cannot be installed; a failure only loses Ctrl-C
        let _ = ctrlc::set_handler(move || stop.store(true, Ordering::Relaxed));
    }
    let start = Instant::now();
    let deadline = a.max_seconds.map(Duration::from_secs_f64);
    let mut nodes_used = 0u64;
    let checkpoint_path = a
        .checkpoint
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.checkpoint.json", campaign.name)));

    while run_index < runs.len() {
        let spec = &runs[run_index];
        let options = SearchOptions {
            workers: a.workers,
            limits: Limits {
                max_nodes: a.max_nodes.map(|n| n.saturating_sub(nodes_used)),
                max_time: deadline.map(|d| d.saturating_sub(start.elapsed())),
            },
            stop: Some(stop.clone()),
            ..SearchOptions::default()
        };
        let outcome = run(spec, &index, &options, next_subset)?;
        nodes_used += outcome.stats.nodes;
        eprintln!(
            "run {}/{}: base {}x{} vertices {} facets {} minfv {}: {} found, {} starts, {} nodes{}",
            run_index + 1,
            runs.len(),
            spec.base_facet.rows(),
            spec.base_facet.cols(),
            spec.vrt,
            spec.fct,
            spec.minfv,
            outcome.results.len(),
            outcome.stats.starts,
            outcome.stats.nodes,
            if outcome.completed() { "" } else { " (stopped)" }
        );
        results.extend(outcome.results.clone());
        if !outcome.completed() {
            let ck = Checkpoint {
                campaign: campaign.name.clone(),
                run_index,
                next_subset: outcome.next_subset,
                results: results.values().map(|m| m.to_string()).collect(),
            };
            ck.save(&checkpoint_path)?;
            eprintln!("stopped; checkpoint written to {}", checkpoint_path.display());
            return Ok(Outcome::Aborted);
        }
        run_index += 1;
        next_subset = 0;
    }

    let found: Vec<IncidenceMatrix> = results.into_values().collect();
    let text = format_matrices(&found);
    match &a.out {
        Some(p) => {
            std::fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?;
            println!("{}", count_line(found.len()));
        }
        None => {
            print!("{text}");
            eprintln!("{}", count_line(found.len()));
        }
    }
    Ok(Outcome::Ok)
}

fn count_line(n: usize) -> String {
    format!("{n} {}", if n == 1 { "matrix" } else { "matrices" })
}

fn cmd_complete(base: &Path, target: &Path, ridge_ones: u32, facet_list: &[PathBuf]) -> Result<Outcome> {
    let base = read_one(base, 0)?;
    let target = read_one(target, 0)?;
    let mut allowed = Vec::new();
    for p in facet_list {
        allowed.extend(read_matrices(p)?);
    }
    let index = if allowed.is_empty() { None } else { Some(FacetIndex::build(&allowed)?) };
    let classes = complete_all_ridges(&base, ridge_ones, &target);
    println!("{} completion classes", classes.len());
    for (n, group) in classes.values().enumerate() {
        let rows: Vec<String> = group.iter().map(|c| c.ridge_row.to_string()).collect();
        let first = &group[0];
        let m = &first.matrix;
        println!("class {}: ridge rows {}", n + 1, rows.join(","));
        print!("{m}");
        for i in 0..m.rows() {
            let f = get_facet(m, i)?;
            let verdict = match &index {
                Some(ix) if ix.contains(&f) => " allowed",
                Some(_) => " not allowed",
                None => "",
            };
            println!("row {i}: {} vertices, facet {}x{}{verdict}", m.row(i).count_ones(), f.rows(), f.cols());
        }
    }
    Ok(Outcome::Ok)
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Verify { catalog, scatter } => cmd_verify(catalog.as_deref(), scatter),
        Command::Gale(a) => cmd_gale(&a),
        Command::Enumerate(a) => cmd_enumerate(&a),
        Command::Facet { file, row, index } => {
            let m = read_one(&file, index)?;
            print!("{}", get_facet(&m, row)?);
            Ok(Outcome::Ok)
        }
        Command::Canon { file, form } => {
            for m in read_matrices(&file)? {
                if form {
                    println!("{}", neighborly_core::canonical_form(&m).1);
                } else {
                    println!("{}", canonical_key(&m));
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Faces { file, k, index } => {
            let poset = build_poset(&read_one(&file, index)?)?;
            let dump = poset.dump();
            let prefix = k.map(|k| format!("dim {k}:"));
            for line in dump.lines() {
                if prefix.as_ref().map_or(true, |p| line.starts_with(p.as_str())) {
                    println!("{line}");
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Hull { catalog, name } => {
            let entries = read_catalog(catalog.as_deref())?;
            let chosen: Vec<_> = entries.iter().filter(|e| name.as_ref().map_or(true, |n| &e.name == n)).collect();
            if chosen.is_empty() {
                bail!("no catalog entry named {:?}", name.unwrap_or_default());
            }
            let ms = chosen
                .iter()
                .map(|e| e.incidence().with_context(|| e.name.clone()))
                .collect::<Result<Vec<_>>>()?;
            print!("{}", format_matrices(&ms));
            Ok(Outcome::Ok)
        }
        Command::Pyramid { file, times } => {
            let ms = read_matrices(&file)?
                .iter()
                .map(|m| pyramid_k(m, times))
                .collect::<Result<Vec<_>, _>>()?;
            print!("{}", format_matrices(&ms));
            Ok(Outcome::Ok)
        }
        Command::Complete {
            base,
            target,
            ridge_ones,
            facet_list,
        } => cmd_complete(&base, &target, ridge_ones, &facet_list),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Ok(Outcome::Aborted) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
