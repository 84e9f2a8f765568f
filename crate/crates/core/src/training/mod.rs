//! Natural training, the adversarial training loops and model selection.
//!
//! Every loop trains on the inductive training view of the graph (test nodes
//! removed). Validation nodes stay in that view and are scored with their own
//! mask.

mod adversarial;

pub use adversarial::{at_gse_train, at_nystrom_train, at_rndsvd_train, perturbation_step, rnd_gse_augment_train};

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{loss_with, GradRequest, ModelConfig, ModelParams, Sgd};
use crate::graph::Graph;
use crate::spectral::{alpha_budget, GseParams, RndSvdConfig};

/// How the inner maximization rebuilds the perturbed adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TrainBackend {
    /// Offset prox on an exact eigendecomposition.
    Exact,
    /// Offset prox on a randomized SVD. The rank is raised to the window end
    /// `k2` when smaller; the seed is re-derived for every call.
    Rndsvd(RndSvdConfig),
    /// Nyström reconstruction from `k` sampled columns, multiplied by
    /// `scale` (default `1 + alpha`).
    Nystrom {
        k: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        scale: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    /// Parameter step size.
    #[serde(default = "default_lr")]
    pub lr: f64,
    /// Adjacency ascent step size; `None` uses `lr`.
    #[serde(default)]
    pub adj_lr: Option<f64>,
    #[serde(default)]
    pub momentum: f64,
    #[serde(default = "default_inner_steps")]
    pub inner_steps: usize,
    #[serde(default)]
    pub gse: GseParams,
    /// Take `gse.alpha` from [`alpha_budget`] instead of the configured value.
    #[serde(default = "default_true")]
    pub auto_alpha: bool,
    /// Perturbation budget as a fraction of the training-graph edge count.
    /// The Frobenius mass `||Ã - A||_F^2` is kept at or below the resulting `Δ`.
    #[serde(default = "default_budget_ratio")]
    pub budget_ratio: f64,
    #[serde(default = "default_backend")]
    pub backend: TrainBackend,
    /// Restart the inner maximization from the clean adjacency every epoch.
    #[serde(default = "default_true")]
    pub reinit_each_epoch: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_epochs() -> usize {
    200
}
fn default_warmup() -> usize {
    10
}
fn default_lr() -> f64 {
    0.01
}
fn default_inner_steps() -> usize {
    5
}
fn default_true() -> bool {
    true
}
fn default_budget_ratio() -> f64 {
    0.1
}
fn default_backend() -> TrainBackend {
    TrainBackend::Exact
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: default_epochs(),
            warmup: default_warmup(),
            lr: default_lr(),
            adj_lr: None,
            momentum: 0.0,
            inner_steps: default_inner_steps(),
            gse: GseParams::default(),
            auto_alpha: true,
            budget_ratio: default_budget_ratio(),
            backend: default_backend(),
            reinit_each_epoch: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.warmup > self.epochs {
            return Err(Error::Config(format!("warmup {} exceeds epochs {}", self.warmup, self.epochs)));
        }
        if self.inner_steps == 0 {
            return Err(Error::Config("inner_steps must be >= 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Config(format!("lr {} must be > 0", self.lr)));
        }
        if let Some(l) = self.adj_lr {
            if !(l >= 0.0) {
                return Err(Error::Config(format!("adj_lr {l} must be >= 0")));
            }
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!("momentum {} not in [0, 1)", self.momentum)));
        }
        if !(self.budget_ratio >= 0.0) {
            return Err(Error::Config(format!("budget_ratio {} must be >= 0", self.budget_ratio)));
        }
        self.gse.validate()
    }

    pub fn adjacency_lr(&self) -> f64 {
        self.adj_lr.unwrap_or(self.lr)
    }

    /// Frobenius budget `Δ` for a graph with `edge_count` edges.
    pub fn budget(&self, edge_count: usize) -> f64 {
        (self.budget_ratio * edge_count as f64).round()
    }

    /// GSE parameters with the offset resolved for an `n`-node graph.
    pub fn resolved_gse(&self, n: usize, edge_count: usize) -> Result<GseParams> {
        let mut g = self.gse;
        if self.auto_alpha {
            g.alpha = alpha_budget(self.budget(edge_count), n)?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpochPhase {
    Natural,
    Warmup,
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub phase: EpochPhase,
    pub train_loss: f64,
    /// Validation loss on the (perturbed, for adversarial epochs) graph.
    pub val_loss: f64,
    /// `||clamp(Ã) - A||_F^2` of the training graph fed to the model.
    pub deviation: f64,
    pub inner_steps: usize,
}

/// Seconds spent per phase in one epoch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub inner_max: f64,
    pub approx: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters were returned; `None` if no epoch ran.
    pub selected_epoch: Option<usize>,
    /// Budget `Δ` used for the Frobenius projection.
    pub budget: f64,
    pub alpha: f64,
    /// Wall time, parallel to `epochs`. Not deterministic.
    pub timings: Vec<PhaseTimings>,
}

impl TrainReport {
    fn new(budget: f64, alpha: f64) -> Self {
        Self {
            epochs: Vec::new(),
            selected_epoch: None,
            budget,
            alpha,
            timings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Epoch with the smallest validation loss; ties go to the earliest epoch.
pub fn select_model(records: &[EpochRecord]) -> Result<usize> {
    let mut best: Option<&EpochRecord> = None;
    for r in records {
        if best.is_none_or(|b| r.val_loss < b.val_loss) {
            best = Some(r);
        }
    }
    best.map(|r| r.epoch)
        .ok_or_else(|| Error::Parameter("model selection over zero epochs".into()))
}

pub(crate) fn diverged(epoch: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Numeric { tensor } => Error::Diverged { epoch, tensor },
        other => other,
    }
}

/// Data the loops read from the training view.
pub(crate) struct TrainData {
    pub a: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub labels: Vec<usize>,
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub edge_count: usize,
    pub num_classes: usize,
}

impl TrainData {
    pub fn from_graph(graph: &Graph) -> Result<Self> {
        let view = graph.training_view().graph;
        if !view.train_mask().iter().any(|&m| m) {
            return Err(Error::Config("training mask is empty".into()));
        }
        if !view.val_mask().iter().any(|&m| m) {
            return Err(Error::Config("validation mask is empty".into()));
        }
        Ok(Self {
            a: view.dense_adjacency(),
            x: view.features().clone(),
            labels: view.labels().to_vec(),
            train: view.train_mask().to_vec(),
            val: view.val_mask().to_vec(),
            edge_count: view.edge_count(),
            num_classes: view.num_classes(),
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

pub(crate) fn loss_only(params: &ModelParams, a: &DMatrix<f64>, data: &TrainData, mask: &[bool]) -> Result<f64> {
    let none = GradRequest {
        params: false,
        adjacency: false,
    };
    Ok(loss_with(params, a, &data.x, &data.labels, mask, none)?.loss)
}

/// Plain descent on the training loss of the clean training view; the
/// returned parameters minimize the clean validation loss over epochs.
pub fn natural_train(model: &ModelConfig, graph: &Graph, cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    cfg.validate()?;
    let data = TrainData::from_graph(graph)?;
    let mut params = ModelParams::init(model, data.x.ncols(), data.num_classes, cfg.seed)?;
    let mut report = TrainReport::new(cfg.budget(data.edge_count), 0.0);
    let mut opt = Sgd::new(cfg.lr, cfg.momentum);
    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    for epoch in 0..cfg.epochs {
        let (record, timing) = natural_epoch(&mut params, &mut opt, &data, epoch, EpochPhase::Natural)?;
        if record.val_loss < best_loss {
            best_loss = record.val_loss;
            best = params.clone();
            report.selected_epoch = Some(epoch);
        }
        report.epochs.push(record);
        report.timings.push(timing);
    }
    Ok((best, report))
}

/// One descent step on the clean graph, then the clean validation loss of the
/// updated parameters.
pub(crate) fn natural_epoch(
    params: &mut ModelParams,
    opt: &mut Sgd,
    data: &TrainData,
    epoch: usize,
    phase: EpochPhase,
) -> Result<(EpochRecord, PhaseTimings)> {
    let t = Instant::now();
    let g = loss_with(params, &data.a, &data.x, &data.labels, &data.train, GradRequest::PARAMS)
        .map_err(diverged(epoch))?;
    opt.step(params, &g.grad_params.expect("requested"));
    if !params.is_finite() {
        return Err(Error::Diverged {
            epoch,
            tensor: "parameters".into(),
        });
    }
    let val_loss = loss_only(params, &data.a, data, &data.val).map_err(diverged(epoch))?;
    let timing = PhaseTimings {
        outer: t.elapsed().as_secs_f64(),
        ..Default::default()
    };
    Ok((
        EpochRecord {
            epoch,
            phase,
            train_loss: g.loss,
            val_loss,
            deviation: 0.0,
            inner_steps: 0,
        },
        timing,
    ))
}
