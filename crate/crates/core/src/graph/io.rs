//! Plain-text graph files.
//!
//! A bundle directory holds:
//!
//! ```text
//! edges.txt     one "u v" pair per line, 0-based ids
//! features.csv  one row of d floats per node, optional header
//! labels.csv    one class index per row, optional header
//! meta.json     {"n": .., "d": .., "num_classes": ..}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Graph, SparseAdjacency};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub n: usize,
    pub d: usize,
    pub num_classes: usize,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads whitespace-separated `u v` pairs into a weight-1 symmetric adjacency.
/// Blank lines and `#` comments are skipped.
pub fn load_edge_list(path: &Path, num_nodes: usize) -> Result<SparseAdjacency> {
    let text = read(path)?;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(path, idx + 1, format!("expected `u v`, got `{line}`")));
        }
        let mut ids = [0usize; 2];
        for (slot, tok) in ids.iter_mut().zip(&toks) {
            *slot = tok
                .parse()
                .map_err(|_| parse_err(path, idx + 1, format!("`{tok}` is not a node id")))?;
            if *slot >= num_nodes {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("node id {slot} out of range for {num_nodes} nodes"),
                ));
            }
        }
        pairs.push((ids[0], ids[1], 1.0));
    }
    SparseAdjacency::from_undirected(num_nodes, pairs)
}

fn csv_rows(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = read(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(|t| t.trim().to_string()).collect()))
        .collect())
}

/// A first row that does not parse as numbers is treated as a header.
fn skip_header<T: std::str::FromStr>(rows: &mut Vec<(usize, Vec<String>)>) {
    if let Some((_, first)) = rows.first() {
        if first.iter().any(|t| t.parse::<T>().is_err()) {
            rows.remove(0);
        }
    }
}

pub fn load_features_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut rows = csv_rows(path)?;
    skip_header::<f64>(&mut rows);
    let d = rows.first().map_or(0, |(_, r)| r.len());
    let mut values = Vec::with_capacity(rows.len() * d);
    for (line, row) in &rows {
        if row.len() != d {
            return Err(parse_err(path, *line, format!("expected {d} columns, got {}", row.len())));
        }
        for tok in row {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, *line, format!("`{tok}` is not a number")))?;
            values.push(v);
        }
    }
    Ok(DMatrix::from_row_slice(rows.len(), d, &values))
}

pub fn load_labels_csv(path: &Path) -> Result<Vec<usize>> {
    let mut rows = csv_rows(path)?;
    skip_header::<usize>(&mut rows);
    rows.iter()
        .map(|(line, row)| {
            let tok = row.last().map(String::as_str).unwrap_or("");
            tok.parse()
                .map_err(|_| parse_err(path, *line, format!("`{tok}` is not a class index")))
        })
        .collect()
}

pub fn load_bundle(dir: &Path) -> Result<Graph> {
    let meta_path = dir.join("meta.json");
    let meta: BundleMeta = serde_json::from_str(&read(&meta_path)?).map_err(|source| Error::Json {
        path: meta_path.clone(),
        source,
    })?;
    let adjacency = load_edge_list(&dir.join("edges.txt"), meta.n)?;
    let features = load_features_csv(&dir.join("features.csv"))?;
    if features.nrows() != meta.n || features.ncols() != meta.d {
        return Err(Error::shape(
            "features.csv",
            format!("{}x{}", meta.n, meta.d),
            format!("{}x{}", features.nrows(), features.ncols()),
        ));
    }
    let labels = load_labels_csv(&dir.join("labels.csv"))?;
    Graph::new(adjacency, features, labels)?.with_num_classes(meta.num_classes)
}

pub fn save_bundle(graph: &Graph, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: String| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(p, e))
    };

    let mut edges = String::new();
    for (i, j, _) in graph.adjacency().edges() {
        let _ = writeln!(edges, "{i} {j}");
    }
    write("edges.txt", edges)?;

    let x = graph.features();
    let mut feats = (0..x.ncols()).map(|k| format!("f{k}")).collect::<Vec<_>>().join(",");
    feats.push('\n');
    for i in 0..x.nrows() {
        let row: Vec<String> = (0..x.ncols()).map(|k| format!("{:e}", x[(i, k)])).collect();
        feats.push_str(&row.join(","));
        feats.push('\n');
    }
    write("features.csv", feats)?;

    let mut labels = String::from("label\n");
    for &c in graph.labels() {
        let _ = writeln!(labels, "{c}");
    }
    write("labels.csv", labels)?;

    let meta = BundleMeta {
        n: graph.n(),
        d: graph.feature_dim(),
        num_classes: graph.num_classes(),
    };
    write("meta.json", serde_json::to_string_pretty(&meta).expect("meta serializes"))
}
