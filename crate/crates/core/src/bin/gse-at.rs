//! Thin command-line front end over the library.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration, 3 data/I-O,
//! 4 numeric failure. Log level comes from `GSE_LOG` (error, info, debug).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use gse_at::attack::{evaluate_attack, rbcd_attack};
use gse_at::experiment::{
    attack_seed, bench_backends, bench_csv, emit_spectrum_report, run_experiment, spectrum_report, split_for_seed,
    train_method, train_seed, ExperimentConfig, Method, SpectrumConfig,
};
use gse_at::gnn::{load_checkpoint, save_checkpoint, ModelParams};
use gse_at::graph::{save_bundle, sbm_generate, Graph, Perturbation, SbmConfig};
use gse_at::{Error, Result};

#[derive(Parser)]
#[command(name = "gse-at", version, about = "GSE-regularized adversarial training for GNNs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed (or selects the run seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for seed-parallel sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an SBM graph bundle (config: SbmConfig; default desk instance).
    GenSbm,
    /// Train one model (config: ExperimentConfig); writes model.bin and report.json.
    Train {
        /// Overrides the first configured method.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Attack a checkpoint with every configured RBCD budget; writes one perturbation file each.
    Attack {
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Clean and (optionally) perturbed test accuracy of a checkpoint.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        perturbation: Option<PathBuf>,
    },
    /// Full seed sweep; writes results.csv.
    Sweep,
    /// Singular-value curves and normalized GSE per budget (config: SpectrumConfig).
    Spectrum,
    /// Median timings of the exact, randomized and Nyström backends.
    Bench {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn experiment(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("this command needs --config <experiment.json>".into()))?;
    ExperimentConfig::from_json_file(path)
}

fn out_dir(cli: &Cli, fallback: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(fallback))
}

/// Split graph and run seed for single-run commands.
fn prepared(cli: &Cli, cfg: &ExperimentConfig) -> Result<(Graph, u64)> {
    let seed = cli.seed.unwrap_or(cfg.seeds[0]);
    let graph = cfg.dataset.load()?;
    Ok((split_for_seed(cfg, &graph, seed)?, seed))
}

fn checkpoint(path: &Path, cfg: &ExperimentConfig) -> Result<ModelParams> {
    let (params, meta) = load_checkpoint(path)?;
    if meta.model.kind != cfg.model.kind {
        return Err(Error::Config(format!(
            "checkpoint holds a {} model, config asks for {}",
            meta.model.kind, cfg.model.kind
        )));
    }
    Ok(params)
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::GenSbm => {
            let mut sbm = match &cli.config {
                Some(p) => read_json::<SbmConfig>(p)?,
                None => SbmConfig::homophilic_desk(0),
            };
            if let Some(s) = cli.seed {
                sbm.seed = s;
            }
            let graph = sbm_generate(&sbm)?;
            let dir = out_dir(cli, "sbm_bundle");
            save_bundle(&graph, &dir)?;
            println!("{} nodes, {} edges -> {}", graph.n(), graph.edge_count(), dir.display());
        }
        Command::Train { method } => {
            let cfg = experiment(cli)?;
            let method = method.unwrap_or(cfg.methods[0]);
            let (split, seed) = prepared(cli, &cfg)?;
            let (params, report) = train_method(method, &cfg.model, &split, &cfg.train, cfg.trials, train_seed(seed))?;
            let dir = out_dir(cli, ".");
            std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
            save_checkpoint(&params, &cfg.model, &dir.join("model.bin"))?;
            write(&dir.join("report.json"), &report.to_json())?;
            let (clean, _) = evaluate_attack(&params, &split, &Perturbation::new(0), split.test_mask())?;
            println!("{method} seed {seed}: clean test accuracy {clean:.4}, selected epoch {:?}", report.selected_epoch);
        }
        Command::Attack { checkpoint: ckpt } => {
            let cfg = experiment(cli)?;
            let (split, seed) = prepared(cli, &cfg)?;
            let params = checkpoint(ckpt, &cfg)?;
            let dir = out_dir(cli, ".");
            let columns = cfg.attack.columns();
            if columns.is_empty() {
                return Err(Error::Config("attack spec is `none`".into()));
            }
            println!("attack,flips,clean,adversarial");
            for (i, (name, mut attack)) in columns.into_iter().enumerate() {
                attack.seed = attack_seed(seed, i);
                let pert = rbcd_attack(&params, &split, split.test_mask(), &attack)?;
                let (clean, adv) = evaluate_attack(&params, &split, &pert, split.test_mask())?;
                std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
                pert.save(&dir.join(format!("perturbation_{name}.txt")))?;
                println!("{name},{},{clean:.6},{adv:.6}", pert.len());
            }
        }
        Command::Eval {
            checkpoint: ckpt,
            perturbation,
        } => {
            let cfg = experiment(cli)?;
            let (split, _) = prepared(cli, &cfg)?;
            let params = checkpoint(ckpt, &cfg)?;
            let pert = match perturbation {
                Some(p) => Perturbation::load(p)?,
                None => Perturbation::new(0),
            };
            let (clean, adv) = evaluate_attack(&params, &split, &pert, split.test_mask())?;
            println!("{}", serde_json::json!({ "clean": clean, "adversarial": adv, "flips": pert.len() }));
        }
        Command::Sweep => {
            let mut cfg = experiment(cli)?;
            if let Some(s) = cli.seed {
                cfg.seeds = vec![s];
            }
            let table = run_experiment(&cfg, cli.threads)?;
            let csv = table.to_csv();
            match cli.out.clone().or(cfg.output_dir.clone()) {
                Some(dir) => write(&dir.join("results.csv"), &csv)?,
                None => print!("{csv}"),
            }
            if let Some(code) = table.all_failed {
                log::error!("every seed failed");
                return Ok(code);
            }
        }
        Command::Spectrum => {
            let path = cli
                .config
                .as_deref()
                .ok_or_else(|| Error::Config("spectrum needs --config <spectrum.json>".into()))?;
            let cfg: SpectrumConfig = read_json(path)?;
            let graph = cfg.dataset.load()?;
            let report = spectrum_report(&graph, &cfg.budgets, cli.seed.unwrap_or(0), &cfg.attack, cfg.beta1, cfg.beta2)?;
            let files = emit_spectrum_report(&report, &out_dir(cli, "spectrum"))?;
            print!("{}", report.ngse_csv());
            for f in files {
                log::info!("wrote {}", f.display());
            }
        }
        Command::Bench { n, k, reps } => {
            let rows = bench_backends(*n, *k, *reps, cli.seed.unwrap_or(0))?;
            let csv = bench_csv(&rows);
            if let Some(dir) = &cli.out {
                write(&dir.join("bench.csv"), &csv)?;
            }
            print!("{csv}");
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GSE_LOG", "error")).init();
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
