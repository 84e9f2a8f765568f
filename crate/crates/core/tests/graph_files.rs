use gse_at::graph::{
    apply_perturbation, inductive_split, load_bundle, load_edge_list, save_bundle, sbm_generate, Perturbation, SbmConfig,
};
use gse_at::Error;

fn small() -> gse_at::graph::Graph {
    sbm_generate(&SbmConfig {
        block_sizes: vec![12, 10, 8],
        p_in: 0.4,
        p_out: 0.05,
        feature_dim: 3,
        feature_shift: 1.0,
        seed: 5,
    })
    .unwrap()
}

#[test]
fn bundle_round_trip_preserves_everything() {
    let g = small();
    let dir = tempfile::tempdir().unwrap();
    save_bundle(&g, dir.path()).unwrap();
    let back = load_bundle(dir.path()).unwrap();
    assert_eq!(back.adjacency(), g.adjacency());
    assert_eq!(back.labels(), g.labels());
    assert_eq!(back.num_classes(), 3);
    assert!((back.features() - g.features()).amax() == 0.0);
}

#[test]
fn perturbation_file_replays() {
    let g = small();
    let p = Perturbation::from_pairs([(0, 1), (3, 20), (7, 29)], 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flips.txt");
    p.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("0 1"));
    let q = Perturbation::load(&path).unwrap();
    assert_eq!(q.pairs().collect::<Vec<_>>(), p.pairs().collect::<Vec<_>>());
    let a = apply_perturbation(&g, &p).unwrap();
    let b = apply_perturbation(&g, &q).unwrap();
    assert_eq!(a.adjacency(), b.adjacency());
}

#[test]
fn applying_twice_restores_the_graph() {
    let g = small();
    let p = Perturbation::from_pairs([(0, 5), (2, 3), (10, 25), (11, 12)], 4).unwrap();
    let once = apply_perturbation(&g, &p).unwrap();
    let twice = apply_perturbation(&once, &p).unwrap();
    assert_eq!(twice.adjacency(), g.adjacency());
    let changed = p.pairs().filter(|&(i, j)| once.adjacency().has_edge(i, j) != g.adjacency().has_edge(i, j)).count();
    assert_eq!(changed, 4);
}

#[test]
fn malformed_edge_list_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edges.txt");
    std::fs::write(&path, "# comment\n0 1\n1 x\n").unwrap();
    match load_edge_list(&path, 3) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn inductive_split_is_disjoint_and_hides_test_nodes() {
    let g = sbm_generate(&SbmConfig::homophilic_desk(1)).unwrap();
    let s = inductive_split(&g, 20, 0.1, 4).unwrap();
    for i in 0..s.n() {
        let roles = [s.train_mask()[i], s.val_mask()[i], s.test_mask()[i]];
        assert!(roles.iter().filter(|&&r| r).count() <= 1);
    }
    let view = s.training_view();
    assert_eq!(view.graph.n(), s.n() - 98);
    assert!(view.kept.iter().all(|&i| !s.test_mask()[i]));
    // no edge in the view touches a test node
    for (i, j, _) in view.graph.adjacency().edges() {
        assert!(!s.test_mask()[view.kept[i]] && !s.test_mask()[view.kept[j]]);
    }
}
