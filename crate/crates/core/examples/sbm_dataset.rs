//! Generate the desk-scale homophilic SBM, split it inductively and write a
//! graph bundle that the CLI and `load_bundle` can read back.

use gse_at::graph::{inductive_split, load_bundle, sbm_generate, SbmConfig};

fn main() -> gse_at::Result<()> {
    let cfg = SbmConfig::homophilic_desk(0);
    let graph = sbm_generate(&cfg)?;
    println!(
        "{} nodes, {} edges (expected {:.0}), {} features, {} classes",
        graph.n(),
        graph.edge_count(),
        cfg.expected_edges(),
        graph.feature_dim(),
        graph.num_classes()
    );

    let split = inductive_split(&graph, 20, 0.1, 0)?;
    let count = |m: &[bool]| m.iter().filter(|&&v| v).count();
    println!(
        "train {}, val {}, test {}",
        count(split.train_mask()),
        count(split.val_mask()),
        count(split.test_mask())
    );
    let view = split.training_view();
    println!("training view: {} nodes, {} edges", view.graph.n(), view.graph.edge_count());

    let dir = std::env::temp_dir().join("gse_at_sbm_bundle");
    gse_at::graph::save_bundle(&graph, &dir)?;
    let back = load_bundle(&dir)?;
    assert_eq!(back.edge_count(), graph.edge_count());
    println!("bundle written to {}", dir.display());
    Ok(())
}
