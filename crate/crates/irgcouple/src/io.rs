//! Text formats.
//!
//! Edge list: first line `n m`, then `m` lines `i j` with 1-based labels,
//! `i < j`, ascending lexicographic order, LF line endings. Weights: one
//! value per line with 17 significant digits. Block grids: a square matrix
//! of whitespace-separated values, one row per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use irgcouple_core::properties::Certificate;
use irgcouple_core::{CoupledTriple, Graph, SolveResult};
use serde::Serialize;
use serde_json::{json, Value};

use crate::canonical::{format_real, to_canonical_string};
use crate::error::{Error, Result};

pub fn format_edge_list(g: &Graph) -> String {
    let mut s = String::with_capacity(16 + 12 * g.edge_count());
    writeln!(s, "{} {}", g.n(), g.edge_count()).unwrap();
    for (i, j) in g.labeled_edges() {
        writeln!(s, "{i} {j}").unwrap();
    }
    s
}

/// Parses an edge list. Pairs may come in any order; they are normalized
/// like [`Graph::new`]. The header edge count must match the body.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<Graph> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing header".into()))?;
    let nums = parse_numbers(header).map_err(|m| err(hl, m))?;
    let [n, m] = nums[..] else {
        return Err(err(hl, format!("header needs `n m`, got {header:?}")));
    };
    let mut pairs = Vec::with_capacity(m);
    for (ln, line) in lines {
        let nums = parse_numbers(line).map_err(|m| err(ln, m))?;
        let [i, j] = nums[..] else {
            return Err(err(ln, format!("edge needs `i j`, got {line:?}")));
        };
        pairs.push((i, j));
    }
    if pairs.len() != m {
        return Err(err(
            hl,
            format!("header says {m} edges, found {}", pairs.len()),
        ));
    }
    Ok(Graph::new(n, &pairs)?)
}

fn parse_numbers(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| format!("bad integer {t:?}: {e}"))
        })
        .collect()
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

pub fn format_weights(weights: &[f64]) -> String {
    let mut s = String::with_capacity(weights.len() * 24);
    for &w in weights {
        s.push_str(&format_real(w));
        s.push('\n');
    }
    s
}

pub fn parse_weights(text: &str, path: &Path) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            l.trim().parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Square matrix of kernel values, one row per line.
pub fn parse_grid(text: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("grid must be square, got {} rows", rows.len()),
        });
    }
    Ok(rows)
}

pub fn read_grid(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_grid(&text, path)
}

/// Metadata written next to a serialized triple.
#[derive(Debug, Clone, Serialize)]
pub struct TripleMeta {
    pub seed: u64,
    pub stream: u64,
    pub n: usize,
    pub kernel: String,
    pub lambda_n: f64,
    pub r_n: f64,
    pub region: [f64; 2],
    pub clipped: bool,
    pub p_inf: f64,
    pub p_inf_analytic: bool,
    pub p_max: f64,
    /// 1-based labels.
    pub heavy_set: Vec<usize>,
}

impl TripleMeta {
    pub fn from_triple(t: &CoupledTriple, kernel: &str) -> Self {
        Self {
            seed: t.seed,
            stream: t.stream_id,
            n: t.n(),
            kernel: kernel.to_string(),
            lambda_n: t.lambda,
            r_n: t.rate,
            region: [t.region.lo, t.region.hi],
            clipped: t.clipped,
            p_inf: t.p_inf,
            p_inf_analytic: t.p_inf_analytic,
            p_max: t.p_max,
            heavy_set: t.heavy_set.labels(),
        }
    }
}

/// Writes `lower.el`, `middle.el`, `upper.el`, `weights.txt`, `meta.json`.
pub fn write_triple(dir: &Path, t: &CoupledTriple, kernel: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_edge_list(&dir.join("lower.el"), &t.lower)?;
    write_edge_list(&dir.join("middle.el"), &t.middle)?;
    write_edge_list(&dir.join("upper.el"), &t.upper)?;
    let wpath = dir.join("weights.txt");
    fs::write(&wpath, format_weights(&t.weights)).map_err(|e| Error::io(&wpath, e))?;
    let mpath = dir.join("meta.json");
    let meta = to_canonical_string(&TripleMeta::from_triple(t, kernel))?;
    fs::write(&mpath, meta).map_err(|e| Error::io(&mpath, e))
}

/// Graphs and weights of a serialized triple: `(lower, middle, upper, weights)`.
pub fn read_triple(dir: &Path) -> Result<(Graph, Graph, Graph, Vec<f64>)> {
    let wpath = dir.join("weights.txt");
    let text = fs::read_to_string(&wpath).map_err(|e| Error::io(&wpath, e))?;
    Ok((
        read_edge_list(&dir.join("lower.el"))?,
        read_edge_list(&dir.join("middle.el"))?,
        read_edge_list(&dir.join("upper.el"))?,
        parse_weights(&text, &wpath)?,
    ))
}

/// Solver record: property, value or bracket, outcome, nodes, wall time
/// and a certificate with 1-based labels.
pub fn solver_record(property: &str, r: &SolveResult, wall_seconds: Option<f64>) -> Value {
    let certificate = match &r.certificate {
        Certificate::Coloring(c) => json!({
            "kind": "coloring",
            "colors": c.iter().map(|c| c + 1).collect::<Vec<_>>(),
        }),
        Certificate::Witness(w) => json!({
            "kind": "witness",
            "vertices": w.iter().map(|v| v + 1).collect::<Vec<_>>(),
        }),
    };
    let mut rec = json!({
        "property": property,
        "outcome": outcome_tag(r),
        "nodes": r.nodes,
        "certificate": certificate,
    });
    match r.value() {
        Some(v) => rec["value"] = json!(v),
        None => rec["bracket"] = json!([r.lower, r.upper]),
    }
    if let Some(t) = wall_seconds {
        rec["wall_time"] = json!(t);
    }
    rec
}

pub fn outcome_tag(r: &SolveResult) -> &'static str {
    if r.is_exact() {
        "exact"
    } else {
        "lower_upper_only"
    }
}
