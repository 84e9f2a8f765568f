//! Natural training against the three adversarial loops on the desk SBM,
//! each evaluated under a 10% global RBCD attack. The trained AT-GSE model is
//! checkpointed and read back.
//!
//! Takes a few minutes in release mode: the exact loop decomposes an
//! 880 x 880 matrix twice per adversarial epoch.

use gse_at::attack::{evaluate_attack, rbcd_attack, AttackConfig};
use gse_at::gnn::{load_checkpoint, save_checkpoint, ModelConfig};
use gse_at::graph::{inductive_split, sbm_generate, SbmConfig};
use gse_at::spectral::RndSvdConfig;
use gse_at::training::{at_gse_train, at_nystrom_train, at_rndsvd_train, natural_train, TrainBackend, TrainConfig};

fn main() -> gse_at::Result<()> {
    let graph = inductive_split(&sbm_generate(&SbmConfig::homophilic_desk(0))?, 20, 0.1, 0)?;
    let model = ModelConfig::gcn();
    let base = TrainConfig {
        epochs: 180,
        warmup: 150,
        lr: 0.4,
        adj_lr: Some(1.0),
        inner_steps: 1,
        ..Default::default()
    };
    let natural = TrainConfig { warmup: 0, ..base };
    let train_nodes = graph.training_view().graph.n();
    let k2 = base.gse.window(train_nodes).1;

    let runs = [
        ("natural", natural_train(&model, &graph, &natural)?),
        ("at_gse", at_gse_train(&model, &graph, &base)?),
        (
            "at_rndsvd",
            at_rndsvd_train(&model, &graph, &TrainConfig { backend: TrainBackend::Rndsvd(RndSvdConfig::new(k2, 0)), ..base })?,
        ),
        (
            "at_nystrom",
            at_nystrom_train(
                &model,
                &graph,
                &TrainConfig {
                    backend: TrainBackend::Nystrom { k: k2, seed: 0, scale: None },
                    ..base
                },
            )?,
        ),
    ];

    let attack = AttackConfig::global(0.10, 1);
    for (name, (params, report)) in &runs {
        let pert = rbcd_attack(params, &graph, graph.test_mask(), &attack)?;
        let (clean, adv) = evaluate_attack(params, &graph, &pert, graph.test_mask())?;
        let approx: f64 = report.timings.iter().map(|t| t.approx).sum();
        println!(
            "{name:>10}: clean {clean:.3}, 10% RBCD {adv:.3}, selected epoch {:?}, approximation time {approx:.1}s",
            report.selected_epoch
        );
    }

    let (params, _) = &runs[1].1;
    let path = std::env::temp_dir().join("gse_at_model.bin");
    save_checkpoint(params, &model, &path)?;
    let (restored, meta) = load_checkpoint(&path)?;
    assert_eq!(&restored, params);
    println!("checkpoint {} holds tensors {:?}", path.display(), meta.tensors);
    Ok(())
}
