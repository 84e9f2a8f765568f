use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Graph, SparseAdjacency};
use crate::error::{Error, Result};
use crate::rng;

/// Two-probability stochastic block model with Gaussian node features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    /// Distance of each class mean from the origin along its own axis.
    pub feature_shift: f64,
    pub seed: u64,
}

impl SbmConfig {
    /// Homophilic two-block instance at the standard desk size:
    /// 981 nodes, about 1,950 edges, 21 features.
    pub fn homophilic_desk(seed: u64) -> Self {
        Self {
            block_sizes: vec![491, 490],
            p_in: 0.0072,
            p_out: 0.0009,
            feature_dim: 21,
            feature_shift: 0.9,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(Error::Config("block_sizes must be nonempty and positive".into()));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        if self.feature_dim == 0 {
            return Err(Error::Config("feature_dim must be positive".into()));
        }
        if !self.feature_shift.is_finite() {
            return Err(Error::Config("feature_shift must be finite".into()));
        }
        Ok(())
    }

    pub fn is_homophilic(&self) -> bool {
        self.p_in > self.p_out
    }

    pub fn num_nodes(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Expected undirected edge count.
    pub fn expected_edges(&self) -> f64 {
        let n = self.num_nodes() as f64;
        let within: f64 = self
            .block_sizes
            .iter()
            .map(|&b| (b * b.saturating_sub(1)) as f64 / 2.0)
            .sum();
        let all = n * (n - 1.0) / 2.0;
        within * self.p_in + (all - within) * self.p_out
    }
}

/// Samples a graph. Class `c` gets feature mean `feature_shift * e_(c mod d)`
/// and unit variance.
pub fn sbm_generate(config: &SbmConfig) -> Result<Graph> {
    config.validate()?;
    let labels: Vec<usize> = config
        .block_sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &size)| std::iter::repeat_n(c, size))
        .collect();
    let n = labels.len();

    let mut edge_rng = rng::stream(config.seed, "sbm.edges");
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { config.p_in } else { config.p_out };
            if edge_rng.random::<f64>() < p {
                pairs.push((i, j, 1.0));
            }
        }
    }
    let adjacency = SparseAdjacency::from_undirected(n, pairs)?;

    let d = config.feature_dim;
    let mut feat_rng = rng::stream(config.seed, "sbm.features");
    let mut features = DMatrix::zeros(n, d);
    for i in 0..n {
        for k in 0..d {
            let noise: f64 = feat_rng.sample(StandardNormal);
            features[(i, k)] = noise;
        }
        features[(i, labels[i] % d)] += config.feature_shift;
    }

    Graph::new(adjacency, features, labels)?.with_num_classes(config.block_sizes.len())
}
