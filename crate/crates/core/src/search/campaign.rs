//! Campaign files and checkpoints.
//!
//! A campaign is a `key = value` text file; `#` starts a comment.
//!
//! ```text
//! name = d5_v7_f10
//! dim = 5
//! vertices = 7
//! facets = 10
//! minfv = 6
//! base_facet = ../matrices/p469.txt
//! facet_list = ../matrices/s3.txt^1, ../matrices/p469.txt
//! ```
//!
//! `vertices` and `facets` take a value or an inclusive range `a-b`.
//! Matrix references are paths relative to the campaign file; a `^k` suffix
//! takes the `k`-fold pyramid, and a file may hold several matrices.
//! `minfv` is one bound, or a comma list with one bound per vertex count in
//! range; it defaults per vertex count (see [`default_minfv`]).

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{default_minfv, CampaignSpec};
use crate::canonical::canonical_key;
use crate::incmat::{parse_matrices, pyramid_k, IncidenceMatrix, MatrixError};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Matrix {
        path: PathBuf,
        #[source]
        source: MatrixError,
    },
    #[error("{0}")]
    Invalid(String),
}

/// A parsed campaign: a family of runs sharing one facet list.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub name: String,
    pub dim: u32,
    pub vertices: RangeInclusive<usize>,
    pub facets: RangeInclusive<usize>,
    /// One bound for all vertex counts, or one per vertex count.
    pub minfv: Option<Vec<u32>>,
    pub base_facets: Vec<IncidenceMatrix>,
    pub facet_list: Vec<IncidenceMatrix>,
}

fn parse_range(v: &str, line: usize) -> Result<RangeInclusive<usize>, CampaignError> {
    let bad = || CampaignError::Syntax {
        line,
        message: format!("expected a count or a range a-b, got `{v}`"),
    };
    let (a, b) = match v.split_once('-') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (v, v),
    };
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn parse_minfv(v: &str, line: usize, vertices: &RangeInclusive<usize>) -> Result<Vec<u32>, CampaignError> {
    let list = v
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CampaignError::Syntax {
            line,
            message: format!("`minfv` is not a count or a list of counts: `{v}`"),
        })?;
    if list.len() != 1 && list.len() != vertices.clone().count() {
        return Err(CampaignError::Syntax {
            line,
            message: format!("`minfv` needs one bound or one per vertex count, got {}", list.len()),
        });
    }
    Ok(list)
}

/// Loads the matrices named by one reference, `path` or `path^k`.
fn load_reference(dir: &Path, reference: &str, line: usize) -> Result<Vec<IncidenceMatrix>, CampaignError> {
    let (file, folds) = match reference.rsplit_once('^') {
        Some((f, k)) => {
            let k: usize = k.trim().parse().map_err(|_| CampaignError::Syntax {
                line,
                message: format!("bad pyramid count in `{reference}`"),
            })?;
            (f.trim(), k)
        }
        None => (reference, 0),
    };
    let path = dir.join(file);
    let text = std::fs::read_to_string(&path).map_err(|source| CampaignError::Io {
        path: path.clone(),
        source,
    })?;
    parse_matrices(&text)
        .and_then(|ms| ms.iter().map(|m| pyramid_k(m, folds)).collect())
        .map_err(|source| CampaignError::Matrix { path, source })
}

impl Campaign {
    pub fn load(path: &Path) -> Result<Self, CampaignError> {
        let text = std::fs::read_to_string(path).map_err(|source| CampaignError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses campaign text, resolving matrix paths against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Self, CampaignError> {
        let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CampaignError::Syntax {
                    line,
                    message: format!("expected key = value, got `{content}`"),
                });
            };
            let key = key.trim();
            if !matches!(key, "name" | "dim" | "vertices" | "facets" | "minfv" | "base_facet" | "facet_list") {
                return Err(CampaignError::Syntax {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if fields.insert(key, (line, value.trim())).is_some() {
                return Err(CampaignError::Syntax {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        let get = |k: &'static str| fields.get(k).copied().ok_or(CampaignError::Missing(k));
        let number = |k: &'static str| -> Result<u32, CampaignError> {
            let (line, v) = get(k)?;
            v.parse().map_err(|_| CampaignError::Syntax {
                line,
                message: format!("`{k}` is not a count: `{v}`"),
            })
        };
        let list = |k: &'static str| -> Result<Vec<IncidenceMatrix>, CampaignError> {
            let (line, v) = get(k)?;
            let mut out = Vec::new();
            for r in v.split(',').map(str::trim).filter(|r| !r.is_empty()) {
                out.extend(load_reference(dir, r, line)?);
            }
            if out.is_empty() {
                return Err(CampaignError::Syntax {
                    line,
                    message: format!("`{k}` names no matrices"),
                });
            }
            Ok(out)
        };
        let (vl, vv) = get("vertices")?;
        let (fl, fv) = get("facets")?;
        Ok(Campaign {
            name: fields.get("name").map_or_else(|| "campaign".to_string(), |(_, v)| v.to_string()),
            dim: number("dim")?,
            vertices: parse_range(vv, vl)?,
            facets: parse_range(fv, fl)?,
            minfv: match fields.get("minfv") {
                None => None,
                Some(&(line, v)) => Some(parse_minfv(v, line, &parse_range(vv, vl)?)?),
            },
            base_facets: list("base_facet")?,
            facet_list: list("facet_list")?,
        })
    }

    pub fn minfv_for(&self, vrt: usize) -> u32 {
        match self.minfv.as_deref() {
            None => default_minfv(self.dim, vrt),
            Some([one]) => *one,
            Some(list) => list[vrt - self.vertices.start()],
        }
    }

    /// The runs of the campaign: each base facet against every vertex and
    /// facet count in range that exceeds the base's own. Ordered by base,
    /// then vertices, then facets.
    pub fn runs(&self) -> Result<Vec<CampaignSpec>, CampaignError> {
        let keys: Vec<_> = self.facet_list.iter().map(canonical_key).collect();
        let mut out = Vec::new();
        for base in &self.base_facets {
            if !keys.contains(&canonical_key(base)) {
                return Err(CampaignError::Invalid(format!(
                    "base facet {}x{} is not in the facet list",
                    base.rows(),
                    base.cols()
                )));
            }
            for vrt in self.vertices.clone().filter(|&v| v > base.cols()) {
                for fct in self.facets.clone().filter(|&f| f > base.rows()) {
                    let spec = CampaignSpec {
                        facet_list: self.facet_list.clone(),
                        base_facet: base.clone(),
                        dim: self.dim,
                        vrt,
                        fct,
                        minfv: self.minfv_for(vrt),
                    };
                    spec.check().map_err(|e| CampaignError::Invalid(e.to_string()))?;
                    out.push(spec);
                }
            }
        }
        Ok(out)
    }
}

/// Progress through a campaign's runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub campaign: String,
    /// Index into [`Campaign::runs`] of the run in progress.
    pub run_index: usize,
    /// First multiset of that run not yet fully processed.
    pub next_subset: u64,
    /// Results so far, one matrix-format block each.
    pub results: Vec<String>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self, CampaignError> {
        let text = std::fs::read_to_string(path).map_err(|source| CampaignError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CampaignError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CampaignError> {
        let text = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        std::fs::write(path, text + "\n").map_err(|source| CampaignError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn matrices(&self) -> Result<Vec<IncidenceMatrix>, CampaignError> {
        self.results
            .iter()
            .map(|s| s.parse().map_err(|e: MatrixError| CampaignError::Invalid(e.to_string())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    fn setup() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "s3.txt", &format!("{}", IncidenceMatrix::simplex(4)));
        dir
    }

    #[test]
    fn parses_ranges_and_pyramids() {
        let dir = setup();
        let text = "# micro\nname = micro\ndim = 4\nvertices = 5-6\nfacets = 5 - 7\nbase_facet = s3.txt\nfacet_list = s3.txt, s3.txt^1\n";
        let c = Campaign::parse(text, dir.path()).unwrap();
        assert_eq!(c.name, "micro");
        assert_eq!(c.vertices, 5..=6);
        assert_eq!(c.facets, 5..=7);
        assert_eq!(c.minfv, None);
        assert_eq!(c.facet_list.len(), 2);
        assert_eq!(c.facet_list[1].cols(), 5);
        let runs = c.runs().unwrap();
        assert_eq!(runs.len(), 6);
        assert_eq!((runs[0].vrt, runs[0].fct, runs[0].minfv), (5, 5, 4));
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let dir = setup();
        let err = Campaign::parse("dim = 4\nbogus\n", dir.path()).unwrap_err();
        assert!(matches!(err, CampaignError::Syntax { line: 2, .. }));
        let err = Campaign::parse("dim = 4\ncolour = red\n", dir.path()).unwrap_err();
        assert!(matches!(err, CampaignError::Syntax { line: 2, .. }));
        let err = Campaign::parse("dim = 4\n", dir.path()).unwrap_err();
        assert!(matches!(err, CampaignError::Missing(_)));
        let err = Campaign::parse(
            "dim=4\nvertices=7-5\nfacets=5\nbase_facet=s3.txt\nfacet_list=s3.txt",
            dir.path(),
        )
        .unwrap_err();
        assert!(matches!(err, CampaignError::Syntax { line: 2, .. }));
        let err = Campaign::parse(
            "dim=4\nvertices=5\nfacets=5\nbase_facet=nope.txt\nfacet_list=s3.txt",
            dir.path(),
        )
        .unwrap_err();
        assert!(matches!(err, CampaignError::Io { .. }));
    }

    #[test]
    fn minfv_per_vertex_count() {
        let dir = setup();
        let base = "dim=4\nvertices=5-7\nfacets=5\nbase_facet=s3.txt\nfacet_list=s3.txt\n";
        let c = Campaign::parse(&format!("{base}minfv=4,5,6"), dir.path()).unwrap();
        let got: Vec<u32> = c.runs().unwrap().iter().map(|r| r.minfv).collect();
        assert_eq!(got, vec![4, 5, 6]);
        let c = Campaign::parse(&format!("{base}minfv=5"), dir.path()).unwrap();
        assert_eq!(c.minfv_for(7), 5);
        let err = Campaign::parse(&format!("{base}minfv=4,5"), dir.path()).unwrap_err();
        assert!(matches!(err, CampaignError::Syntax { line: 6, .. }));
    }

    #[test]
    fn base_outside_list_is_invalid() {
        let dir = setup();
        let c = Campaign::parse(
            "dim=4\nvertices=5\nfacets=5\nbase_facet=s3.txt\nfacet_list=s3.txt^1",
            dir.path(),
        )
        .unwrap();
        assert!(matches!(c.runs(), Err(CampaignError::Invalid(_))));
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        let ck = Checkpoint {
            campaign: "x".into(),
            run_index: 3,
            next_subset: 17,
            results: vec![IncidenceMatrix::simplex(3).to_string()],
        };
        ck.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.matrices().unwrap(), vec![IncidenceMatrix::simplex(3)]);
    }
}
