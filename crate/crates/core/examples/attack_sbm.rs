//! Evasion attacks against a naturally trained GCN on the desk SBM: global
//! and degree-capped RBCD at three budgets, and the random max-GSE attack.

use gse_at::attack::{evaluate_attack, flip_budget, rbcd_attack, rnd_gse_attack, AttackConfig};
use gse_at::gnn::ModelConfig;
use gse_at::graph::{inductive_split, sbm_generate, SbmConfig};
use gse_at::training::{natural_train, TrainConfig};

fn main() -> gse_at::Result<()> {
    let graph = inductive_split(&sbm_generate(&SbmConfig::homophilic_desk(0))?, 20, 0.1, 0)?;
    let cfg = TrainConfig {
        epochs: 200,
        warmup: 0,
        lr: 0.4,
        ..Default::default()
    };
    let (params, _) = natural_train(&ModelConfig::gcn(), &graph, &cfg)?;
    let test = graph.test_mask();

    for budget in [0.05, 0.10, 0.25] {
        for (label, attack) in [
            ("global", AttackConfig::global(budget, 1)),
            ("local (cap 2)", AttackConfig::local(budget, 2, 1)),
        ] {
            let pert = rbcd_attack(&params, &graph, test, &attack)?;
            let (clean, adv) = evaluate_attack(&params, &graph, &pert, test)?;
            println!("{label:>13} {:>3.0}%: {} flips, accuracy {clean:.3} -> {adv:.3}", budget * 100.0, pert.len());
        }
    }

    let flips = flip_budget(0.10, graph.edge_count());
    let r = rnd_gse_attack(&graph, flips, 8, 0.1, 0.5, 3)?;
    let (clean, adv) = evaluate_attack(&params, &graph, &r.perturbation, test)?;
    println!(
        "RndGSE 10%: best of {} candidates (GSE {:.2}), accuracy {clean:.3} -> {adv:.3}",
        r.candidate_gse.len(),
        r.gse
    );
    Ok(())
}
