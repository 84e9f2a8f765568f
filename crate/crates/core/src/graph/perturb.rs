use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, SparseAdjacency};
use crate::error::{Error, Result};

/// A set of undirected node pairs to toggle, bounded by a flip budget.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Perturbation {
    flips: BTreeSet<(usize, usize)>,
    budget: usize,
}

impl Perturbation {
    pub fn new(budget: usize) -> Self {
        Self {
            flips: BTreeSet::new(),
            budget,
        }
    }

    pub fn from_pairs<I>(pairs: I, budget: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut p = Self::new(budget);
        for (i, j) in pairs {
            p.insert(i, j)?;
        }
        Ok(p)
    }

    /// Adds a pair; returns `false` if it was already present.
    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::Parameter(format!("self pair ({i}, {i}) cannot be flipped")));
        }
        let key = (i.min(j), i.max(j));
        if self.flips.contains(&key) {
            return Ok(false);
        }
        if self.flips.len() >= self.budget {
            return Err(Error::Parameter(format!("flip budget {} exhausted", self.budget)));
        }
        self.flips.insert(key);
        Ok(true)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    /// Pairs as `(i, j)` with `i < j`, sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.flips.iter().copied()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.flips.contains(&(i.min(j), i.max(j)))
    }

    /// Flip count per node.
    pub fn node_counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; n];
        for &(i, j) in &self.flips {
            counts[i] += 1;
            counts[j] += 1;
        }
        counts
    }

    /// One `u v` line per flipped pair.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.pairs() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }

    /// Reads a perturbation file; the budget is set to the number of pairs read.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    message: format!("expected `u v`, got `{line}`"),
                })
            };
            let (u, v) = (parse(it.next())?, parse(it.next())?);
            pairs.push((u, v));
        }
        let budget = pairs.len();
        Self::from_pairs(pairs, budget)
    }
}

/// Toggles every listed pair: edges are removed, non-edges become weight-1 edges.
pub fn apply_perturbation(graph: &Graph, pert: &Perturbation) -> Result<Graph> {
    let n = graph.n();
    if pert.len() > pert.budget() {
        return Err(Error::Parameter(format!(
            "{} flips exceed budget {}",
            pert.len(),
            pert.budget()
        )));
    }
    if let Some((i, j)) = pert.pairs().find(|&(_, j)| j >= n) {
        return Err(Error::Index(format!("flip ({i}, {j}) with n = {n}")));
    }
    let adj = graph.adjacency();
    let kept = adj.edges().filter(|&(i, j, _)| !pert.contains(i, j));
    let added = pert
        .pairs()
        .filter(|&(i, j)| !adj.has_edge(i, j))
        .map(|(i, j)| (i, j, 1.0));
    let toggled = SparseAdjacency::from_undirected(n, kept.chain(added).collect::<Vec<_>>())?;
    graph.with_adjacency(toggled)
}
