//! Graph data model: sparse symmetric adjacency, node features, labels and
//! inductive split masks, plus synthetic generation, file I/O and
//! perturbation bookkeeping.

mod io;
mod perturb;
mod sbm;
mod sparse;
mod split;

pub use io::{load_bundle, load_edge_list, load_features_csv, load_labels_csv, save_bundle, BundleMeta};
pub use perturb::{apply_perturbation, Perturbation};
pub use sbm::{sbm_generate, SbmConfig};
pub use sparse::SparseAdjacency;
pub use split::inductive_split;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An undirected attributed graph with node labels and split masks.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: SparseAdjacency,
    features: DMatrix<f64>,
    labels: Vec<usize>,
    num_classes: usize,
    train_mask: Vec<bool>,
    val_mask: Vec<bool>,
    test_mask: Vec<bool>,
}

impl Graph {
    /// Builds a graph with empty masks.
    pub fn new(adjacency: SparseAdjacency, features: DMatrix<f64>, labels: Vec<usize>) -> Result<Self> {
        let n = adjacency.n();
        if features.nrows() != n {
            return Err(Error::shape("features", format!("{n} rows"), features.nrows()));
        }
        if labels.len() != n {
            return Err(Error::shape("labels", n, labels.len()));
        }
        let num_classes = labels.iter().max().map_or(0, |&c| c + 1);
        Ok(Self {
            adjacency,
            features,
            labels,
            num_classes,
            train_mask: vec![false; n],
            val_mask: vec![false; n],
            test_mask: vec![false; n],
        })
    }

    /// Overrides the class count (e.g. from bundle metadata, when some class is absent).
    pub fn with_num_classes(mut self, num_classes: usize) -> Result<Self> {
        if self.labels.iter().any(|&c| c >= num_classes) {
            return Err(Error::Config(format!("labels exceed declared class count {num_classes}")));
        }
        self.num_classes = num_classes;
        Ok(self)
    }

    pub fn with_masks(mut self, train: Vec<bool>, val: Vec<bool>, test: Vec<bool>) -> Result<Self> {
        let n = self.n();
        for (name, m) in [("train_mask", &train), ("val_mask", &val), ("test_mask", &test)] {
            if m.len() != n {
                return Err(Error::shape(name, n, m.len()));
            }
        }
        if (0..n).any(|i| u8::from(train[i]) + u8::from(val[i]) + u8::from(test[i]) > 1) {
            return Err(Error::Config("split masks overlap".into()));
        }
        self.train_mask = train;
        self.val_mask = val;
        self.test_mask = test;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn adjacency(&self) -> &SparseAdjacency {
        &self.adjacency
    }

    pub fn dense_adjacency(&self) -> DMatrix<f64> {
        self.adjacency.to_dense()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn train_mask(&self) -> &[bool] {
        &self.train_mask
    }

    pub fn val_mask(&self) -> &[bool] {
        &self.val_mask
    }

    pub fn test_mask(&self) -> &[bool] {
        &self.test_mask
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.edge_count()
    }

    /// Same nodes and attributes, different topology.
    pub fn with_adjacency(&self, adjacency: SparseAdjacency) -> Result<Self> {
        if adjacency.n() != self.n() {
            return Err(Error::shape("adjacency", self.n(), adjacency.n()));
        }
        Ok(Self {
            adjacency,
            ..self.clone()
        })
    }

    /// The graph as seen during training: test nodes and all their edges are
    /// removed. Validation nodes stay as context.
    pub fn training_view(&self) -> InductiveView {
        let kept: Vec<usize> = (0..self.n()).filter(|&i| !self.test_mask[i]).collect();
        let pick = |m: &[bool]| kept.iter().map(|&i| m[i]).collect::<Vec<_>>();
        let graph = Graph {
            adjacency: self.adjacency.subgraph(&kept),
            features: self.features.select_rows(kept.iter()),
            labels: kept.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
            train_mask: pick(&self.train_mask),
            val_mask: pick(&self.val_mask),
            test_mask: vec![false; kept.len()],
        };
        InductiveView { graph, kept }
    }
}

/// Training-time subgraph together with the original index of each node.
#[derive(Debug, Clone)]
pub struct InductiveView {
    pub graph: Graph,
    pub kept: Vec<usize>,
}
