//! Adversarial training for graph neural networks with graph-subspace-energy
//! (GSE) regularization.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: sparse symmetric graphs, SBM generation, file bundles,
//!   perturbations and inductive splits.
//! - [`spectral`]: exact and randomized SVD, Nyström reconstruction, GSE and
//!   its offset proximal step.
//! - [`gnn`]: GCN and GPRGNN with hand-derived gradients, including the
//!   gradient with respect to adjacency weights.
//! - [`attack`]: randomized block-coordinate topology attacks and the
//!   random max-GSE augmentation.
//! - [`training`]: natural training and the three adversarial loops.
//! - [`experiment`]: seeded sweeps, spectrum reports and backend timings.

// `!(x >= 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod error;
pub mod experiment;
pub mod gnn;
pub mod graph;
pub mod rng;
pub mod spectral;
pub mod training;

pub use error::{Error, Result};
