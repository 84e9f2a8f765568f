//! Seeded experiment sweeps, spectrum reports and backend timings.
//!
//! Every stage of a run draws from its own stream derived from the run seed,
//! so results do not depend on thread count or on which stages ran before.

mod bench;
mod spectrum;

pub use bench::{bench_backends, bench_csv, random_sparse_symmetric, BenchRow};
pub use spectrum::{emit_spectrum_report, spectrum_report, SpectrumAttack, SpectrumConfig, SpectrumReport};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attack::{evaluate_attack, rbcd_attack, AttackConfig};
use crate::error::{Error, Result};
use crate::gnn::{ModelConfig, ModelParams};
use crate::graph::{inductive_split, load_bundle, sbm_generate, Graph, SbmConfig};
use crate::rng::child_seed;
use crate::spectral::RndSvdConfig;
use crate::training::{
    at_gse_train, at_nystrom_train, at_rndsvd_train, natural_train, rnd_gse_augment_train, TrainBackend, TrainConfig,
    TrainReport,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSpec {
    Sbm(SbmConfig),
    Bundle(PathBuf),
}

impl DatasetSpec {
    pub fn load(&self) -> Result<Graph> {
        match self {
            DatasetSpec::Sbm(c) => sbm_generate(c),
            DatasetSpec::Bundle(p) => load_bundle(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Natural,
    AtGse,
    AtRndsvd,
    AtNystrom,
    RndGseAugment,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Natural => "natural",
            Method::AtGse => "at_gse",
            Method::AtRndsvd => "at_rndsvd",
            Method::AtNystrom => "at_nystrom",
            Method::RndGseAugment => "rnd_gse_augment",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    #[serde(default = "default_per_class")]
    pub per_class: usize,
    #[serde(default = "default_test_frac")]
    pub test_frac: f64,
}

fn default_per_class() -> usize {
    20
}
fn default_test_frac() -> f64 {
    0.1
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            per_class: default_per_class(),
            test_frac: default_test_frac(),
        }
    }
}

/// Evaluation attack. Budgets are fractions of the edge count; with a
/// `local_cap` every budget is also attacked under the per-node flip cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AttackSpec {
    None,
    Rbcd {
        #[serde(default = "default_budgets")]
        budgets: Vec<f64>,
        #[serde(default)]
        local_cap: Option<usize>,
        #[serde(default = "default_attack_iterations")]
        iterations: usize,
        #[serde(default = "default_block_size")]
        block_size: usize,
        #[serde(default = "default_attack_lr")]
        lr: f64,
    },
}

fn default_budgets() -> Vec<f64> {
    vec![0.05, 0.10, 0.25]
}
fn default_attack_iterations() -> usize {
    AttackConfig::global(0.1, 0).iterations
}
fn default_block_size() -> usize {
    AttackConfig::global(0.1, 0).block_size
}
fn default_attack_lr() -> f64 {
    AttackConfig::global(0.1, 0).lr
}

impl AttackSpec {
    pub fn rbcd(budgets: Vec<f64>, local_cap: Option<usize>) -> Self {
        AttackSpec::Rbcd {
            budgets,
            local_cap,
            iterations: default_attack_iterations(),
            block_size: default_block_size(),
            lr: default_attack_lr(),
        }
    }

    /// `(column name, attack config without seed)` per evaluated attack.
    pub fn columns(&self) -> Vec<(String, AttackConfig)> {
        let AttackSpec::Rbcd {
            budgets,
            local_cap,
            iterations,
            block_size,
            lr,
        } = self
        else {
            return Vec::new();
        };
        let base = |b: f64, cap: Option<usize>| AttackConfig {
            budget_ratio: b,
            block_size: *block_size,
            iterations: *iterations,
            lr: *lr,
            seed: 0,
            local_degree_cap: cap,
        };
        let pct = |b: f64| format!("{}", (b * 1000.0).round() / 10.0);
        let mut cols: Vec<(String, AttackConfig)> =
            budgets.iter().map(|&b| (format!("global_{}", pct(b)), base(b, None))).collect();
        if let Some(cap) = local_cap {
            cols.extend(budgets.iter().map(|&b| (format!("local_{}", pct(b)), base(b, Some(*cap)))));
        }
        cols
    }
}

fn default_methods() -> Vec<Method> {
    vec![Method::Natural]
}
fn default_trials() -> usize {
    64
}
fn default_attack() -> AttackSpec {
    AttackSpec::None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub split: SplitSpec,
    pub model: ModelConfig,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_attack")]
    pub attack: AttackSpec,
    pub seeds: Vec<u64>,
    /// Candidate count for [`Method::RndGseAugment`].
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be nonempty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must be nonempty".into()));
        }
        if let DatasetSpec::Bundle(p) = &self.dataset {
            if !p.is_dir() {
                return Err(Error::Config(format!("bundle directory {} does not exist", p.display())));
            }
        }
        if let DatasetSpec::Sbm(c) = &self.dataset {
            c.validate()?;
        }
        for (_, a) in self.attack.columns() {
            a.validate()?;
        }
        self.train.validate()
    }
}

/// Training config with the backend the method's loop expects. A configured
/// backend of the right kind is kept; otherwise defaults are filled in
/// (randomized rank and Nyström columns at the window end `k2`).
pub fn train_config_for(method: Method, base: &TrainConfig, train_nodes: usize, seed: u64) -> TrainConfig {
    let mut cfg = *base;
    cfg.seed = seed;
    let (_, k2) = cfg.gse.window(train_nodes);
    cfg.backend = match (method, base.backend) {
        (Method::AtGse, _) => TrainBackend::Exact,
        (Method::AtRndsvd, b @ TrainBackend::Rndsvd(_)) => b,
        (Method::AtRndsvd, _) => TrainBackend::Rndsvd(RndSvdConfig::new(k2, 0)),
        (Method::AtNystrom, b @ TrainBackend::Nystrom { .. }) => b,
        (Method::AtNystrom, _) => TrainBackend::Nystrom {
            k: k2.max(1),
            seed: 0,
            scale: None,
        },
        (_, b) => b,
    };
    cfg
}

/// Trains `model` with `method` on the training view of `graph`.
pub fn train_method(
    method: Method,
    model: &ModelConfig,
    graph: &Graph,
    base: &TrainConfig,
    trials: usize,
    seed: u64,
) -> Result<(ModelParams, TrainReport)> {
    let train_nodes = graph.test_mask().iter().filter(|&&t| !t).count();
    let cfg = train_config_for(method, base, train_nodes, seed);
    match method {
        Method::Natural => natural_train(model, graph, &cfg),
        Method::AtGse => at_gse_train(model, graph, &cfg),
        Method::AtRndsvd => at_rndsvd_train(model, graph, &cfg),
        Method::AtNystrom => at_nystrom_train(model, graph, &cfg),
        Method::RndGseAugment => rnd_gse_augment_train(model, graph, &cfg, trials),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: String,
    pub method: String,
    /// Seed number, or `mean` / `std` for aggregates.
    pub seed: String,
    /// `ok`, or the error message of a failed seed.
    pub status: String,
    /// Clean test accuracy followed by one value per attack column; `None`
    /// for failed seeds.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    /// `clean` plus one name per attack column.
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
    /// Exit code of the first failure when every seed failed.
    pub all_failed: Option<i32>,
}

/// Printed precision; aggregates are computed from the printed values so the
/// file is self-consistent.
fn rounded(v: f64) -> f64 {
    format!("{v:.6}").parse().expect("formatted float parses")
}

impl ExperimentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,method,seed,status");
        for c in &self.columns {
            write!(out, ",{c}").expect("write to string");
        }
        out.push('\n');
        for r in &self.rows {
            let status = r.status.replace([',', '\n', '"'], " ");
            write!(out, "{},{},{},{status}", r.model, r.method, r.seed).expect("write to string");
            for v in &r.values {
                match v {
                    Some(v) => write!(out, ",{v:.6}"),
                    None => write!(out, ","),
                }
                .expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    /// Values of `column` over successful per-seed rows of `method`.
    pub fn column_values(&self, method: Method, column: &str) -> Vec<f64> {
        let Some(c) = self.columns.iter().position(|x| x == column) else {
            return Vec::new();
        };
        let name = method.to_string();
        self.rows
            .iter()
            .filter(|r| r.method == name && r.status == "ok" && r.seed.parse::<u64>().is_ok())
            .filter_map(|r| r.values[c])
            .collect()
    }
}

/// Sample mean and standard deviation (`n - 1`; zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// The split used for run `seed`.
pub fn split_for_seed(cfg: &ExperimentConfig, graph: &Graph, seed: u64) -> Result<Graph> {
    inductive_split(graph, cfg.split.per_class, cfg.split.test_frac, child_seed(seed, "experiment.split", 0))
}

/// Training seed of run `seed`.
pub fn train_seed(seed: u64) -> u64 {
    child_seed(seed, "experiment.train", 0)
}

/// Seed of attack column `index` in run `seed`.
pub fn attack_seed(seed: u64, index: usize) -> u64 {
    child_seed(seed, "experiment.attack", index as u64)
}

fn run_seed(cfg: &ExperimentConfig, graph: &Graph, method: Method, seed: u64) -> Result<Vec<f64>> {
    let split = split_for_seed(cfg, graph, seed)?;
    let (params, _) = train_method(method, &cfg.model, &split, &cfg.train, cfg.trials, train_seed(seed))?;
    let test = split.test_mask();
    let mut values = Vec::new();
    let (clean, _) = evaluate_attack(&params, &split, &Default::default(), test)?;
    values.push(rounded(clean));
    for (i, (_, mut attack)) in cfg.attack.columns().into_iter().enumerate() {
        attack.seed = attack_seed(seed, i);
        let pert = rbcd_attack(&params, &split, test, &attack)?;
        let (_, adv) = evaluate_attack(&params, &split, &pert, test)?;
        values.push(rounded(adv));
    }
    Ok(values)
}

/// Runs every method over every seed: split, train, attack, evaluate. Seeds
/// are spread over `threads` workers; output order and content do not depend
/// on the thread count. A failing seed yields a failure row.
pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentTable> {
    cfg.validate()?;
    let graph = cfg.dataset.load()?;
    let attack_cols = cfg.attack.columns();
    let mut columns = vec!["clean".to_string()];
    columns.extend(attack_cols.iter().map(|(n, _)| n.clone()));

    let jobs: Vec<(Method, u64)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let results = parallel_map(&jobs, threads.max(1), |&(m, s)| {
        log::info!("running {m} seed {s}");
        run_seed(cfg, &graph, m, s)
    });

    let mut rows = Vec::new();
    let mut first_error = None;
    let mut any_ok = false;
    for &method in &cfg.methods {
        let mut ok_values: Vec<Vec<f64>> = Vec::new();
        for ((m, s), res) in jobs.iter().zip(&results) {
            if *m != method {
                continue;
            }
            let row = |status: String, values| ResultRow {
                model: cfg.model.kind.to_string(),
                method: method.to_string(),
                seed: s.to_string(),
                status,
                values,
            };
            match res {
                Ok(v) => {
                    any_ok = true;
                    rows.push(row("ok".into(), v.iter().map(|&x| Some(x)).collect()));
                    ok_values.push(v.clone());
                }
                Err(e) => {
                    log::warn!("{method} seed {s} failed: {e}");
                    first_error.get_or_insert(e.exit_code());
                    rows.push(row(format!("error: {e}"), vec![None; columns.len()]));
                }
            }
        }
        if !ok_values.is_empty() {
            let stats: Vec<(f64, f64)> = (0..columns.len())
                .map(|c| mean_std(&ok_values.iter().map(|v| v[c]).collect::<Vec<_>>()))
                .collect();
            for (label, pick) in [("mean", 0), ("std", 1)] {
                rows.push(ResultRow {
                    model: cfg.model.kind.to_string(),
                    method: method.to_string(),
                    seed: label.into(),
                    status: "ok".into(),
                    values: stats.iter().map(|&(m, s)| Some(if pick == 0 { m } else { s })).collect(),
                });
            }
        }
    }
    Ok(ExperimentTable {
        columns,
        rows,
        all_failed: if any_ok { None } else { first_error },
    })
}

/// Order-preserving map over `items` on up to `threads` scoped threads.
pub(crate) fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            dataset: DatasetSpec::Sbm(SbmConfig {
                block_sizes: vec![40, 40],
                p_in: 0.15,
                p_out: 0.02,
                feature_dim: 4,
                feature_shift: 1.5,
                seed: 1,
            }),
            split: SplitSpec {
                per_class: 5,
                test_frac: 0.2,
            },
            model: ModelConfig::gcn().with_hidden(8),
            methods: vec![Method::Natural],
            train: TrainConfig {
                epochs: 20,
                warmup: 5,
                lr: 0.3,
                inner_steps: 1,
                ..Default::default()
            },
            attack: AttackSpec::None,
            seeds: vec![0],
            trials: 4,
            output_dir: None,
        }
    }

    #[test]
    fn single_seed_no_attack_gives_clean_only() {
        let t = run_experiment(&tiny_config(), 1).unwrap();
        assert_eq!(t.columns, vec!["clean"]);
        // one seed row plus mean and std
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[0].seed, "0");
        assert_eq!(t.rows[2].values, vec![Some(0.0)]);
        assert!(t.to_csv().starts_with("model,method,seed,status,clean\ngcn,natural,0,ok,"));
    }

    #[test]
    fn aggregates_and_threads_are_consistent() {
        let mut cfg = tiny_config();
        cfg.seeds = vec![0, 1, 2];
        cfg.methods = vec![Method::Natural, Method::AtGse];
        cfg.attack = AttackSpec::Rbcd {
            budgets: vec![0.1],
            local_cap: Some(2),
            iterations: 5,
            block_size: 200,
            lr: 0.5,
        };
        let t1 = run_experiment(&cfg, 1).unwrap();
        let t3 = run_experiment(&cfg, 3).unwrap();
        assert_eq!(t1.to_csv(), t3.to_csv());
        assert_eq!(t1.columns, vec!["clean", "global_10", "local_10"]);
        let clean = t1.column_values(Method::AtGse, "clean");
        assert_eq!(clean.len(), 3);
        let (m, s) = mean_std(&clean);
        let mean_row = t1.rows.iter().find(|r| r.method == "at_gse" && r.seed == "mean").unwrap();
        let std_row = t1.rows.iter().find(|r| r.method == "at_gse" && r.seed == "std").unwrap();
        assert_eq!(mean_row.values[0], Some(m));
        assert_eq!(std_row.values[0], Some(s));
    }

    #[test]
    fn failing_seeds_are_recorded() {
        let mut cfg = tiny_config();
        cfg.split.per_class = 100;
        let t = run_experiment(&cfg, 1).unwrap();
        assert!(t.rows[0].status.starts_with("error"));
        assert_eq!(t.all_failed, Some(2));
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Natural, Method::AtGse, Method::AtRndsvd, Method::AtNystrom, Method::RndGseAugment] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let json = r#"{
            "dataset": {"sbm": {"block_sizes": [10, 10], "p_in": 0.3, "p_out": 0.05,
                                "feature_dim": 3, "feature_shift": 1.0, "seed": 0}},
            "model": {"kind": "gcn"},
            "attack": {"kind": "rbcd", "local_cap": 2},
            "seeds": [0, 1]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.model.hidden, 64);
        assert_eq!(cfg.methods, vec![Method::Natural]);
        assert_eq!(cfg.train.epochs, 200);
        assert_eq!(cfg.attack.columns().len(), 6);
        assert_eq!(cfg.attack.columns()[0].0, "global_5");
    }

    #[test]
    fn partial_gse_block_keeps_other_defaults() {
        let json = r#"{
            "dataset": {"bundle": "unused"},
            "model": {"kind": "gprgnn"},
            "train": {"epochs": 5, "gse": {"beta2": 0.3}},
            "seeds": [0]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.train.gse.beta1, 0.1);
        assert_eq!(cfg.train.gse.beta2, 0.3);
        assert_eq!(cfg.train.warmup, 10);
    }
}
