use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attack::{flip_budget, random_perturbation, rbcd_attack, AttackConfig};
use crate::error::{Error, Result};
use crate::gnn::ModelConfig;
use crate::graph::{apply_perturbation, inductive_split, Graph, Perturbation};
use crate::rng::{self, child_seed};
use crate::spectral::{gse_of_spectrum, singular_spectrum, spectrum_csv};
use crate::training::{natural_train, TrainConfig};

/// How perturbed graphs are produced for the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpectrumAttack {
    /// Uniformly random flips.
    Random,
    /// Global RBCD against a naturally trained model, aimed at a 10% test split.
    Rbcd {
        model: ModelConfig,
        train: TrainConfig,
        #[serde(default = "default_iterations")]
        iterations: usize,
    },
}

fn default_iterations() -> usize {
    AttackConfig::global(0.1, 0).iterations
}

/// Input of the `spectrum` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub dataset: super::DatasetSpec,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<f64>,
    #[serde(default = "default_attack")]
    pub attack: SpectrumAttack,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
}

fn default_budgets() -> Vec<f64> {
    vec![0.05, 0.10, 0.25]
}
fn default_attack() -> SpectrumAttack {
    SpectrumAttack::Random
}
fn default_beta1() -> f64 {
    0.1
}
fn default_beta2() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub clean: Vec<f64>,
    /// `(budget ratio, singular values)` per budget.
    pub curves: Vec<(f64, Vec<f64>)>,
    /// `(budget ratio, gse(perturbed) / gse(clean))` per budget.
    pub ngse: Vec<(f64, f64)>,
}

impl SpectrumReport {
    pub fn ngse_csv(&self) -> String {
        let mut out = String::from("budget,ngse\n");
        for (b, v) in &self.ngse {
            out.push_str(&format!("{b},{v:.12e}\n"));
        }
        out
    }
}

fn perturbations(graph: &Graph, budgets: &[f64], seed: u64, attack: &SpectrumAttack) -> Result<Vec<Perturbation>> {
    match attack {
        SpectrumAttack::Random => {
            let mut r = rng::stream(seed, "spectrum.random");
            budgets
                .iter()
                .map(|&b| random_perturbation(graph.n(), flip_budget(b, graph.edge_count()), &mut r))
                .collect()
        }
        SpectrumAttack::Rbcd { model, train, iterations } => {
            let split = inductive_split(graph, 20, 0.1, child_seed(seed, "spectrum.split", 0))?;
            let cfg = TrainConfig {
                seed: child_seed(seed, "spectrum.train", 0),
                ..*train
            };
            let (params, _) = natural_train(model, &split, &cfg)?;
            budgets
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    let mut a = AttackConfig::global(b, child_seed(seed, "spectrum.attack", i as u64));
                    a.iterations = *iterations;
                    rbcd_attack(&params, &split, split.test_mask(), &a)
                })
                .collect()
        }
    }
}

/// Singular-value curves of the clean graph and of one attacked graph per
/// budget, with the normalized GSE over `[beta1, beta2]`.
pub fn spectrum_report(
    graph: &Graph,
    budgets: &[f64],
    seed: u64,
    attack: &SpectrumAttack,
    beta1: f64,
    beta2: f64,
) -> Result<SpectrumReport> {
    let clean = singular_spectrum(&graph.dense_adjacency())?;
    let base = gse_of_spectrum(&clean, beta1, beta2)?;
    if base <= 0.0 {
        return Err(Error::Domain("clean graph has zero subspace energy".into()));
    }
    let mut curves = Vec::new();
    let mut ngse = Vec::new();
    for (&b, pert) in budgets.iter().zip(perturbations(graph, budgets, seed, attack)?) {
        let sigma = singular_spectrum(&apply_perturbation(graph, &pert)?.dense_adjacency())?;
        ngse.push((b, gse_of_spectrum(&sigma, beta1, beta2)? / base));
        curves.push((b, sigma));
    }
    Ok(SpectrumReport { clean, curves, ngse })
}

/// Writes `spectrum_clean.csv`, one `spectrum_<budget>.csv` per budget
/// (header `index,sigma`) and `ngse.csv` (header `budget,ngse`) to `out_dir`.
/// Returns the written paths.
pub fn emit_spectrum_report(report: &SpectrumReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = vec![(out_dir.join("spectrum_clean.csv"), spectrum_csv("index,sigma", &report.clean))];
    for (b, sigma) in &report.curves {
        files.push((out_dir.join(format!("spectrum_{b}.csv")), spectrum_csv("index,sigma", sigma)));
    }
    files.push((out_dir.join("ngse.csv"), report.ngse_csv()));
    for (path, text) in &files {
        fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
