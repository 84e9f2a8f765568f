use std::time::Instant;

use nalgebra::DMatrix;

use super::{
    diverged, loss_only, natural_epoch, natural_train, EpochPhase, EpochRecord, PhaseTimings, TrainBackend,
    TrainConfig, TrainData, TrainReport,
};
use crate::attack::{flip_budget, rnd_gse_attack};
use crate::error::{Error, Result};
use crate::gnn::{loss_with, GradRequest, ModelConfig, ModelParams, Sgd};
use crate::graph::{apply_perturbation, Graph};
use crate::rng::child_seed;
use crate::spectral::{gse_offset_prox, nystrom_approx, GseParams, SvdBackend};

/// Rebuilds the perturbed adjacency after an ascent step: the offset prox for
/// the SVD backends, a scaled Nyström reconstruction otherwise. `seed` feeds
/// the randomized backends.
pub fn perturbation_step(a_tilde: &DMatrix<f64>, backend: &TrainBackend, gse: &GseParams, seed: u64) -> Result<DMatrix<f64>> {
    let n = a_tilde.nrows();
    match *backend {
        TrainBackend::Exact => gse_offset_prox(a_tilde, gse, &SvdBackend::Exact),
        TrainBackend::Rndsvd(cfg) => {
            let (_, k2) = gse.window(n);
            let mut cfg = cfg;
            cfg.k = cfg.k.max(k2);
            cfg.seed = seed;
            gse_offset_prox(a_tilde, gse, &SvdBackend::Randomized(cfg))
        }
        TrainBackend::Nystrom { k, scale, .. } => {
            if k == 0 || k > n {
                return Err(Error::Parameter(format!("Nyström k = {k} not in 1..={n}")));
            }
            let s = scale.unwrap_or(1.0 + gse.alpha);
            Ok(nystrom_approx(a_tilde, k, seed)? * s)
        }
    }
}

/// Pulls `a_tilde` back onto `||Ã - A||_F^2 <= budget` along its deviation.
fn project_budget(a_tilde: &mut DMatrix<f64>, a: &DMatrix<f64>, budget: f64) {
    let mass = (&*a_tilde - a).norm_squared();
    if mass > budget {
        let t = (budget / mass).sqrt();
        a_tilde.zip_apply(a, |x, base| *x = base + t * (*x - base));
    }
}

/// What the model sees: weights clamped to `[0, 1]`, no self-loops (the
/// normalization adds them).
fn model_input(a_tilde: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = a_tilde.map(|v| v.clamp(0.0, 1.0));
    m.fill_diagonal(0.0);
    m
}

struct InnerMax<'a> {
    data: &'a TrainData,
    backend: TrainBackend,
    gse: GseParams,
    adj_lr: f64,
    steps: usize,
    budget: f64,
    seed: u64,
    calls: u64,
}

struct InnerResult {
    a_tilde: DMatrix<f64>,
    steps: usize,
    grad_time: f64,
    approx_time: f64,
}

impl InnerMax<'_> {
    /// Ascent on the adjacency (gradient taken at the clamped input, applied
    /// to the unclamped iterate), then the perturbation step and the budget
    /// projection.
    fn run(&mut self, params: &ModelParams, start: DMatrix<f64>, mask: &[bool], epoch: usize) -> Result<InnerResult> {
        let d = self.data;
        let mut a_tilde = start;
        let mut prev = f64::NAN;
        let (mut steps, mut grad_time, mut approx_time) = (0, 0.0, 0.0);
        for _ in 0..self.steps {
            let t = Instant::now();
            let input = model_input(&a_tilde);
            let r = loss_with(params, &input, &d.x, &d.labels, mask, GradRequest::ADJACENCY).map_err(diverged(epoch))?;
            grad_time += t.elapsed().as_secs_f64();
            if (r.loss - prev).abs() < 1e-6 {
                break;
            }
            prev = r.loss;
            a_tilde += r.grad_adjacency.expect("requested") * self.adj_lr;

            let t = Instant::now();
            let seed = child_seed(self.seed, "train.approx", self.calls);
            self.calls += 1;
            a_tilde = perturbation_step(&a_tilde, &self.backend, &self.gse, seed)?;
            project_budget(&mut a_tilde, &d.a, self.budget);
            approx_time += t.elapsed().as_secs_f64();
            if a_tilde.iter().any(|v| !v.is_finite()) {
                return Err(Error::Diverged {
                    epoch,
                    tensor: "perturbed adjacency".into(),
                });
            }
            steps += 1;
        }
        Ok(InnerResult {
            a_tilde,
            steps,
            grad_time,
            approx_time,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Expect {
    Exact,
    Rndsvd,
    Nystrom,
}

fn check_backend(cfg: &TrainConfig, expect: Expect) -> Result<()> {
    let ok = matches!(
        (cfg.backend, expect),
        (TrainBackend::Exact, Expect::Exact)
            | (TrainBackend::Rndsvd(_), Expect::Rndsvd)
            | (TrainBackend::Nystrom { .. }, Expect::Nystrom)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("backend {:?} does not match the training loop", cfg.backend)))
    }
}

fn adversarial_train(model: &ModelConfig, graph: &Graph, cfg: &TrainConfig, expect: Expect) -> Result<(ModelParams, TrainReport)> {
    cfg.validate()?;
    check_backend(cfg, expect)?;
    let data = TrainData::from_graph(graph)?;
    let n = data.n();
    if let TrainBackend::Rndsvd(r) = cfg.backend {
        let (_, k2) = cfg.gse.window(n);
        if r.k.max(k2) + r.p > n {
            return Err(Error::Config(format!("randomized sketch {} + {} exceeds n = {n}", r.k.max(k2), r.p)));
        }
    }
    let budget = cfg.budget(data.edge_count);
    let gse = cfg.resolved_gse(n, data.edge_count)?;
    let mut params = ModelParams::init(model, data.x.ncols(), data.num_classes, cfg.seed)?;
    let mut opt = Sgd::new(cfg.lr, cfg.momentum);
    let mut report = TrainReport::new(budget, gse.alpha);
    let seed = match cfg.backend {
        TrainBackend::Nystrom { seed, .. } => seed ^ cfg.seed,
        _ => cfg.seed,
    };
    let mut inner = InnerMax {
        data: &data,
        backend: cfg.backend,
        gse,
        adj_lr: cfg.adjacency_lr(),
        steps: cfg.inner_steps,
        budget,
        seed,
        calls: 0,
    };

    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut a_train = data.a.clone();
    let mut a_val = data.a.clone();
    // selection only sees adversarial epochs, unless there are none
    let select_warmup = cfg.warmup == cfg.epochs;
    for epoch in 0..cfg.epochs {
        let (record, timing) = if epoch < cfg.warmup {
            natural_epoch(&mut params, &mut opt, &data, epoch, EpochPhase::Warmup)?
        } else {
            let start = if cfg.reinit_each_epoch { data.a.clone() } else { a_train };
            let tr = inner.run(&params, start, &data.train, epoch)?;
            a_train = tr.a_tilde;

            let t = Instant::now();
            let input = model_input(&a_train);
            let g = loss_with(&params, &input, &data.x, &data.labels, &data.train, GradRequest::PARAMS)
                .map_err(diverged(epoch))?;
            opt.step(&mut params, &g.grad_params.expect("requested"));
            if !params.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    tensor: "parameters".into(),
                });
            }
            let outer = t.elapsed().as_secs_f64();

            let start = if cfg.reinit_each_epoch { data.a.clone() } else { a_val };
            let va = inner.run(&params, start, &data.val, epoch)?;
            a_val = va.a_tilde;
            let val_loss = loss_only(&params, &model_input(&a_val), &data, &data.val).map_err(diverged(epoch))?;
            (
                EpochRecord {
                    epoch,
                    phase: EpochPhase::Adversarial,
                    train_loss: g.loss,
                    val_loss,
                    deviation: (&input - &data.a).norm_squared(),
                    inner_steps: tr.steps,
                },
                PhaseTimings {
                    inner_max: tr.grad_time + va.grad_time,
                    approx: tr.approx_time + va.approx_time,
                    outer,
                },
            )
        };
        log::debug!(
            "epoch {epoch} {:?}: train {:.4} val {:.4}",
            record.phase,
            record.train_loss,
            record.val_loss
        );
        let selectable = select_warmup || record.phase == EpochPhase::Adversarial;
        if selectable && record.val_loss < best_loss {
            best_loss = record.val_loss;
            best = params.clone();
            report.selected_epoch = Some(epoch);
        }
        report.epochs.push(record);
        report.timings.push(timing);
    }
    Ok((best, report))
}

/// Adversarial training with the offset prox on an exact decomposition.
/// Requires `cfg.backend` to be [`TrainBackend::Exact`].
pub fn at_gse_train(model: &ModelConfig, graph: &Graph, cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    adversarial_train(model, graph, cfg, Expect::Exact)
}

/// Same loop with the prox computed from a randomized SVD.
/// Requires `cfg.backend` to be [`TrainBackend::Rndsvd`].
pub fn at_rndsvd_train(model: &ModelConfig, graph: &Graph, cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    adversarial_train(model, graph, cfg, Expect::Rndsvd)
}

/// Same loop with the prox replaced by a scaled Nyström reconstruction.
/// Requires `cfg.backend` to be [`TrainBackend::Nystrom`].
pub fn at_nystrom_train(model: &ModelConfig, graph: &Graph, cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    adversarial_train(model, graph, cfg, Expect::Nystrom)
}

/// Natural training on the training view augmented with the max-GSE random
/// perturbation of `round(budget_ratio * |E|)` flips out of `trials` samples.
pub fn rnd_gse_augment_train(
    model: &ModelConfig,
    graph: &Graph,
    cfg: &TrainConfig,
    trials: usize,
) -> Result<(ModelParams, TrainReport)> {
    let view = graph.training_view().graph;
    let flips = flip_budget(cfg.budget_ratio, view.edge_count());
    let chosen = rnd_gse_attack(
        &view,
        flips,
        trials,
        cfg.gse.beta1,
        cfg.gse.beta2,
        child_seed(cfg.seed, "train.rnd_gse", 0),
    )?;
    let augmented = apply_perturbation(&view, &chosen.perturbation)?;
    natural_train(model, &augmented, cfg)
}
