use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;

use super::AttackConfig;
use crate::error::{Error, Result};
use crate::gnn::{loss_with, GradRequest, ModelParams};
use crate::graph::{Graph, Perturbation};
use crate::rng;

type Pair = (usize, usize);

/// Randomized block-coordinate ascent on continuous flip weights.
///
/// Raises the masked loss of frozen `params` on `graph`. Pairs between two
/// test nodes are never proposed when `mask` does not touch the test set.
pub fn rbcd_attack(params: &ModelParams, graph: &Graph, mask: &[bool], cfg: &AttackConfig) -> Result<Perturbation> {
    cfg.validate()?;
    let n = graph.n();
    if n < 2 {
        return Err(Error::Parameter("attack needs at least two nodes".into()));
    }
    let budget = cfg.budget(graph.edge_count());
    let total_pairs = n * (n - 1) / 2;
    let block = cfg.block_size.min(total_pairs).max(budget.min(total_pairs));

    let test = graph.test_mask();
    let skip_test_pairs = !mask.iter().zip(test).any(|(&m, &t)| m && t) && test.iter().any(|&t| t);
    let allowed = |i: usize, j: usize| !(skip_test_pairs && test[i] && test[j]);
    let available = if skip_test_pairs {
        let t = test.iter().filter(|&&t| t).count();
        total_pairs - t * t.saturating_sub(1) / 2
    } else {
        total_pairs
    };
    let block = block.min(available);

    let a = graph.dense_adjacency();
    // flip direction: +1 adds an edge, -1 removes one
    let sign = a.map(|v| 1.0 - 2.0 * v.min(1.0));
    let mut rng = rng::stream(cfg.seed, "attack.rbcd");
    let mut weights: BTreeMap<Pair, f64> = BTreeMap::new();

    for it in 0..cfg.iterations {
        // refill the block with fresh candidates
        while weights.len() < block {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i != j && allowed(i, j) {
                weights.entry((i.min(j), i.max(j))).or_insert(0.0);
            }
        }
        let perturbed = perturbed_adjacency(&a, &sign, &weights);
        let g = loss_with(params, &perturbed, graph.features(), graph.labels(), mask, GradRequest::ADJACENCY)?
            .grad_adjacency
            .expect("requested");
        let grads: Vec<(Pair, f64)> = weights.keys().map(|&(i, j)| ((i, j), g[(i, j)] * sign[(i, j)])).collect();
        let scale = grads.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if scale > 0.0 {
            for ((i, j), v) in grads {
                let w = weights.get_mut(&(i, j)).expect("key from map");
                *w = (*w + cfg.lr * v / scale).clamp(0.0, 1.0);
            }
        }
        let kept = top_weights(&weights, budget, cfg.local_degree_cap, n);
        weights.retain(|k, _| kept.contains_key(k));
        weights.extend(kept);
        log::debug!("rbcd iteration {it}: {} positive weights", weights.len());
    }

    let chosen = top_weights(&weights, budget, cfg.local_degree_cap, n);
    Perturbation::from_pairs(chosen.into_keys(), budget)
}

fn perturbed_adjacency(a: &DMatrix<f64>, sign: &DMatrix<f64>, weights: &BTreeMap<Pair, f64>) -> DMatrix<f64> {
    let mut out = a.clone();
    for (&(i, j), &w) in weights {
        let v = a[(i, j)] + w * sign[(i, j)];
        out[(i, j)] = v;
        out[(j, i)] = v;
    }
    out
}

/// Hard projection: the `budget` largest positive weights, visited in
/// descending order (ties by pair index) and skipped when a node cap would be
/// exceeded.
fn top_weights(weights: &BTreeMap<Pair, f64>, budget: usize, cap: Option<usize>, n: usize) -> BTreeMap<Pair, f64> {
    let mut order: Vec<(Pair, f64)> = weights.iter().filter(|(_, &w)| w > 0.0).map(|(&k, &w)| (k, w)).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut counts = vec![0usize; n];
    let mut out = BTreeMap::new();
    for ((i, j), w) in order {
        if out.len() == budget {
            break;
        }
        if let Some(c) = cap {
            if counts[i] >= c || counts[j] >= c {
                continue;
            }
        }
        counts[i] += 1;
        counts[j] += 1;
        out.insert((i, j), w);
    }
    out
}
