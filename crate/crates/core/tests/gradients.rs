mod common;

use common::{check_adjacency_gradients, check_param_gradients, gradient_instance};
use gse_at::gnn::{loss_and_grads, predict, softmax_rows, ModelConfig, ModelParams, Sgd};
use nalgebra::DMatrix;

fn configs() -> [ModelConfig; 2] {
    let mut gpr = ModelConfig::gprgnn().with_hidden(6);
    gpr.hops = 4;
    [ModelConfig::gcn().with_hidden(6), gpr]
}

#[test]
fn parameter_gradients_match_central_differences() {
    for cfg in configs() {
        for seed in 0..3 {
            let inst = gradient_instance(12, 5, 3, seed);
            let params = ModelParams::init(&cfg, 5, 3, seed + 100).unwrap();
            let c = check_param_gradients(&params, &inst, 1e-5, 1e-4);
            assert!(c.fraction() >= 0.99, "{} seed {seed}: {c:?}", cfg.kind);
        }
    }
}

#[test]
fn adjacency_gradients_match_central_differences() {
    for cfg in configs() {
        for seed in 0..3 {
            let inst = gradient_instance(12, 5, 3, seed);
            let params = ModelParams::init(&cfg, 5, 3, seed + 100).unwrap();
            let c = check_adjacency_gradients(&params, &inst, 1e-5, 1e-4);
            assert!(c.significant > 50);
            assert!(c.fraction() >= 0.99, "{} seed {seed}: {c:?}", cfg.kind);
        }
    }
}

#[test]
fn adjacency_gradient_is_exactly_symmetric() {
    for cfg in configs() {
        let inst = gradient_instance(10, 4, 2, 5);
        let params = ModelParams::init(&cfg, 4, 2, 5).unwrap();
        let g = loss_and_grads(&params, &inst.a, &inst.x, &inst.labels, &inst.mask)
            .unwrap()
            .grad_adjacency;
        assert_eq!(g, g.transpose());
    }
}

#[test]
fn softmax_rows_sum_to_one() {
    let inst = gradient_instance(15, 4, 3, 9);
    for cfg in configs() {
        let params = ModelParams::init(&cfg, 4, 3, 1).unwrap();
        let p = softmax_rows(&predict(&params, &inst.a, &inst.x).unwrap());
        for row in p.row_iter() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn descent_on_separable_toy_never_increases_loss() {
    // two cliques, features that reveal the clique
    let n = 12;
    let a = DMatrix::from_fn(n, n, |i, j| if i != j && (i < 6) == (j < 6) { 1.0 } else { 0.0 });
    let x = DMatrix::from_fn(n, 2, |i, j| if (i < 6) == (j == 0) { 1.0 } else { 0.0 });
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= 6)).collect();
    let mask = vec![true; n];
    for cfg in configs() {
        let mut params = ModelParams::init(&cfg, 2, 2, 3).unwrap();
        let mut opt = Sgd::new(0.05, 0.0);
        let mut prev = f64::INFINITY;
        for _ in 0..50 {
            let b = loss_and_grads(&params, &a, &x, &labels, &mask).unwrap();
            assert!(b.loss <= prev + 1e-12, "{}: {} > {prev}", cfg.kind, b.loss);
            prev = b.loss;
            opt.step(&mut params, &b.grad_params);
        }
    }
}
