use rand::seq::SliceRandom;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng;

/// Samples `per_class` training and `per_class` validation nodes from every
/// class, plus `floor(test_frac * n)` test nodes from what remains. Nodes
/// left over are unlabeled context.
pub fn inductive_split(graph: &Graph, per_class: usize, test_frac: f64, seed: u64) -> Result<Graph> {
    if !(0.0..1.0).contains(&test_frac) {
        return Err(Error::Parameter(format!("test_frac = {test_frac} outside [0, 1)")));
    }
    let n = graph.n();
    let mut rng = rng::stream(seed, "split");

    let mut train = vec![false; n];
    let mut val = vec![false; n];
    for class in 0..graph.num_classes() {
        let mut members: Vec<usize> = (0..n).filter(|&i| graph.labels()[i] == class).collect();
        if members.len() < 2 * per_class {
            return Err(Error::Split {
                class,
                available: members.len(),
                required: 2 * per_class,
            });
        }
        members.shuffle(&mut rng);
        for &i in &members[..per_class] {
            train[i] = true;
        }
        for &i in &members[per_class..2 * per_class] {
            val[i] = true;
        }
    }

    let test_count = (test_frac * n as f64).floor() as usize;
    let mut rest: Vec<usize> = (0..n).filter(|&i| !train[i] && !val[i]).collect();
    if rest.len() < test_count {
        return Err(Error::Parameter(format!(
            "{test_count} test nodes requested but only {} unlabeled nodes remain",
            rest.len()
        )));
    }
    rest.shuffle(&mut rng);
    let mut test = vec![false; n];
    for &i in &rest[..test_count] {
        test[i] = true;
    }

    graph.clone().with_masks(train, val, test)
}
