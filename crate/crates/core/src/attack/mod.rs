//! Topology evasion attacks.
//!
//! The RBCD attacks here are simplified reimplementations: candidate blocks
//! are uniform over all node pairs and the budget projection is a hard
//! top-`Δ` cut. The optional per-node flip cap stands in for the locally
//! constrained variant.

mod rbcd;
mod rnd_gse;

pub use rbcd::rbcd_attack;
pub use rnd_gse::{random_perturbation, rnd_gse_attack, RndGseResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{masked_accuracy, predict, ModelParams};
use crate::graph::{apply_perturbation, Graph, Perturbation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Flip budget as a fraction of the edge count.
    pub budget_ratio: f64,
    /// Candidate pairs updated per iteration.
    #[serde(default = "default_block_size")]
    pub block_size: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default)]
    pub seed: u64,
    /// Per-node flip cap (local variant). `None` is the global attack.
    #[serde(default)]
    pub local_degree_cap: Option<usize>,
}

fn default_block_size() -> usize {
    20_000
}
fn default_iterations() -> usize {
    60
}
fn default_lr() -> f64 {
    0.5
}

impl AttackConfig {
    pub fn global(budget_ratio: f64, seed: u64) -> Self {
        Self {
            budget_ratio,
            block_size: default_block_size(),
            iterations: default_iterations(),
            lr: default_lr(),
            seed,
            local_degree_cap: None,
        }
    }

    pub fn local(budget_ratio: f64, cap: usize, seed: u64) -> Self {
        Self {
            local_degree_cap: Some(cap),
            ..Self::global(budget_ratio, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget_ratio > 0.0 && self.budget_ratio <= 1.0) {
            return Err(Error::Parameter(format!("budget_ratio {} not in (0, 1]", self.budget_ratio)));
        }
        if self.block_size == 0 {
            return Err(Error::Parameter("block_size must be >= 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Parameter(format!("attack lr {} must be > 0", self.lr)));
        }
        if self.local_degree_cap == Some(0) {
            return Err(Error::Parameter("local_degree_cap must be >= 1".into()));
        }
        Ok(())
    }

    /// `Δ = round(budget_ratio * |E|)`, at least 1.
    pub fn budget(&self, edge_count: usize) -> usize {
        flip_budget(self.budget_ratio, edge_count)
    }
}

pub fn flip_budget(ratio: f64, edge_count: usize) -> usize {
    ((ratio * edge_count as f64).round() as usize).max(1)
}

/// Accuracy on `mask` before and after applying `pert`, parameters frozen.
pub fn evaluate_attack(params: &ModelParams, clean: &Graph, pert: &Perturbation, mask: &[bool]) -> Result<(f64, f64)> {
    if !mask.iter().any(|&m| m) {
        return Err(Error::Evaluation("empty evaluation mask".into()));
    }
    let perturbed = apply_perturbation(clean, pert)?;
    let acc = |g: &Graph| masked_accuracy(&predict(params, &g.dense_adjacency(), g.features())?, g.labels(), mask);
    Ok((acc(clean)?, acc(&perturbed)?))
}
