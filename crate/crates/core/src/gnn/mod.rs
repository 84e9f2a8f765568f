//! GCN and GPRGNN backbones with hand-derived gradients.
//!
//! Besides parameter gradients, [`loss_and_grads`] returns the gradient of
//! the loss with respect to the raw (unnormalized) adjacency weights, which
//! the topology attacks and the adversarial inner maximization ascend.

mod checkpoint;
mod gcn;
mod gprgnn;
mod loss;
mod norm;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use gcn::{gcn_forward, GcnParams};
pub use gprgnn::{gprgnn_forward, GprgnnParams};
pub use loss::{masked_accuracy, masked_cross_entropy, predictions, softmax_rows};
pub use norm::{normalize_adjacency, normalize_with_degrees, NormalizedAdjacency};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gcn,
    Gprgnn,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Gcn => "gcn",
            ModelKind::Gprgnn => "gprgnn",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    /// Propagation depth `K` (GPRGNN only).
    #[serde(default = "default_hops")]
    pub hops: usize,
    /// Teleport probability of the PageRank-style initial coefficients.
    #[serde(default = "default_ppr_alpha")]
    pub ppr_alpha: f64,
}

fn default_hidden() -> usize {
    64
}
fn default_hops() -> usize {
    10
}
fn default_ppr_alpha() -> f64 {
    0.1
}

impl ModelConfig {
    pub fn gcn() -> Self {
        Self {
            kind: ModelKind::Gcn,
            hidden: default_hidden(),
            hops: default_hops(),
            ppr_alpha: default_ppr_alpha(),
        }
    }

    pub fn gprgnn() -> Self {
        Self {
            kind: ModelKind::Gprgnn,
            ..Self::gcn()
        }
    }

    pub fn with_hidden(mut self, hidden: usize) -> Self {
        self.hidden = hidden;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Gcn(GcnParams),
    Gprgnn(GprgnnParams),
}

fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..bound))
}

impl ModelParams {
    /// Glorot-uniform weights; GPR coefficients start at `a (1 - a)^k`.
    pub fn init(config: &ModelConfig, input_dim: usize, num_classes: usize, seed: u64) -> Result<Self> {
        if config.hidden == 0 || input_dim == 0 || num_classes == 0 {
            return Err(Error::Parameter("model dimensions must be positive".into()));
        }
        let mut rng = rng::stream(seed, "model.init");
        let w1 = glorot(input_dim, config.hidden, &mut rng);
        let w2 = glorot(config.hidden, num_classes, &mut rng);
        Ok(match config.kind {
            ModelKind::Gcn => ModelParams::Gcn(GcnParams { w1, w2 }),
            ModelKind::Gprgnn => {
                if config.hops == 0 {
                    return Err(Error::Parameter("GPRGNN needs K >= 1".into()));
                }
                let a = config.ppr_alpha;
                let gpr_coeffs = DVector::from_iterator(
                    config.hops + 1,
                    (0..=config.hops).map(|k| a * (1.0 - a).powi(k as i32)),
                );
                ModelParams::Gprgnn(GprgnnParams {
                    mlp_w1: w1,
                    mlp_w2: w2,
                    gpr_coeffs,
                })
            }
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Gcn(_) => ModelKind::Gcn,
            ModelParams::Gprgnn(_) => ModelKind::Gprgnn,
        }
    }

    /// Named tensors in serialization order. Vectors appear as `len x 1`.
    pub fn tensors(&self) -> Vec<(&'static str, DMatrix<f64>)> {
        match self {
            ModelParams::Gcn(p) => vec![("w1", p.w1.clone()), ("w2", p.w2.clone())],
            ModelParams::Gprgnn(p) => vec![
                ("mlp_w1", p.mlp_w1.clone()),
                ("mlp_w2", p.mlp_w2.clone()),
                ("gpr_coeffs", DMatrix::from_column_slice(p.gpr_coeffs.len(), 1, p.gpr_coeffs.as_slice())),
            ],
        }
    }

    fn slices(&self) -> Vec<&[f64]> {
        match self {
            ModelParams::Gcn(p) => vec![p.w1.as_slice(), p.w2.as_slice()],
            ModelParams::Gprgnn(p) => vec![p.mlp_w1.as_slice(), p.mlp_w2.as_slice(), p.gpr_coeffs.as_slice()],
        }
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            ModelParams::Gcn(p) => vec![p.w1.as_mut_slice(), p.w2.as_mut_slice()],
            ModelParams::Gprgnn(p) => vec![
                p.mlp_w1.as_mut_slice(),
                p.mlp_w2.as_mut_slice(),
                p.gpr_coeffs.as_mut_slice(),
            ],
        }
    }

    pub fn num_parameters(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    /// All parameters in serialization order (column-major within a tensor).
    pub fn to_flat(&self) -> Vec<f64> {
        self.slices().concat()
    }

    pub fn set_flat(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.num_parameters() {
            return Err(Error::shape("flat parameters", self.num_parameters(), values.len()));
        }
        let mut offset = 0;
        for s in self.slices_mut() {
            s.copy_from_slice(&values[offset..offset + s.len()]);
            offset += s.len();
        }
        Ok(())
    }

    /// `self += scale * other`; shapes must match.
    pub fn axpy(&mut self, scale: f64, other: &ModelParams) {
        let src = other.slices();
        for (dst, src) in self.slices_mut().into_iter().zip(src) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn zeros_like(&self) -> ModelParams {
        let mut z = self.clone();
        for s in z.slices_mut() {
            s.fill(0.0);
        }
        z
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Logits for a pre-normalized adjacency.
pub fn forward(params: &ModelParams, a_norm: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match params {
        ModelParams::Gcn(p) => gcn_forward(p, a_norm, x),
        ModelParams::Gprgnn(p) => gprgnn_forward(p, a_norm, x),
    }
}

/// Logits for a raw weighted adjacency.
pub fn predict(params: &ModelParams, a: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    forward(params, &normalize_adjacency(a)?, x)
}

/// Loss plus gradients with respect to the parameters and the raw adjacency.
#[derive(Debug, Clone)]
pub struct LossBundle {
    pub loss: f64,
    pub grad_params: ModelParams,
    /// `dL/dw_ij` for the undirected pair weight `w_ij = A_ij = A_ji`
    /// (diagonal: `dL/dA_ii`). Symmetric.
    pub grad_adjacency: DMatrix<f64>,
}

/// Which gradients [`loss_with`] should compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradRequest {
    pub params: bool,
    pub adjacency: bool,
}

impl GradRequest {
    pub const ALL: GradRequest = GradRequest {
        params: true,
        adjacency: true,
    };
    pub const PARAMS: GradRequest = GradRequest {
        params: true,
        adjacency: false,
    };
    pub const ADJACENCY: GradRequest = GradRequest {
        params: false,
        adjacency: true,
    };
}

/// Partial result of [`loss_with`]; fields are `None` when not requested.
#[derive(Debug, Clone)]
pub struct PartialGrads {
    pub loss: f64,
    pub grad_params: Option<ModelParams>,
    pub grad_adjacency: Option<DMatrix<f64>>,
}

fn ensure_finite(m: &DMatrix<f64>, tensor: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric { tensor: tensor.into() })
    }
}

pub fn loss_with(
    params: &ModelParams,
    a: &DMatrix<f64>,
    x: &DMatrix<f64>,
    labels: &[usize],
    mask: &[bool],
    request: GradRequest,
) -> Result<PartialGrads> {
    ensure_finite(a, "adjacency")?;
    ensure_finite(x, "features")?;
    if !params.is_finite() {
        return Err(Error::Numeric { tensor: "parameters".into() });
    }
    let norm = normalize_with_degrees(a)?;
    let s = &norm.matrix;

    let (loss, (grad_params, grad_s)) = match params {
        ModelParams::Gcn(p) => {
            let (logits, cache) = gcn::forward_cached(p, s, x)?;
            ensure_finite(&logits, "logits")?;
            let (loss, g) = loss::cross_entropy_with_grad(&logits, labels, mask)?;
            let (gp, gs) = gcn::backward(p, s, x, &cache, &g, request.adjacency);
            (loss, (ModelParams::Gcn(gp), gs))
        }
        ModelParams::Gprgnn(p) => {
            let (logits, cache) = gprgnn::forward_cached(p, s, x)?;
            ensure_finite(&logits, "logits")?;
            let (loss, g) = loss::cross_entropy_with_grad(&logits, labels, mask)?;
            let (gp, gs) = gprgnn::backward(p, s, x, &cache, &g, request.adjacency);
            (loss, (ModelParams::Gprgnn(gp), gs))
        }
    };
    if !loss.is_finite() {
        return Err(Error::Numeric { tensor: "loss".into() });
    }
    if request.params && !grad_params.is_finite() {
        return Err(Error::Numeric { tensor: "parameter gradient".into() });
    }
    let grad_adjacency = match grad_s {
        Some(gs) => {
            let g = norm::pair_gradient(&norm::normalization_backward(&gs, &norm));
            ensure_finite(&g, "adjacency gradient")?;
            Some(g)
        }
        None => None,
    };
    Ok(PartialGrads {
        loss,
        grad_params: request.params.then_some(grad_params),
        grad_adjacency,
    })
}

/// Masked cross-entropy with every gradient.
pub fn loss_and_grads(
    params: &ModelParams,
    a: &DMatrix<f64>,
    x: &DMatrix<f64>,
    labels: &[usize],
    mask: &[bool],
) -> Result<LossBundle> {
    let g = loss_with(params, a, x, labels, mask, GradRequest::ALL)?;
    Ok(LossBundle {
        loss: g.loss,
        grad_params: g.grad_params.expect("requested"),
        grad_adjacency: g.grad_adjacency.expect("requested"),
    })
}

/// Plain gradient descent, optionally with heavy-ball momentum.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub lr: f64,
    pub momentum: f64,
    velocity: Option<ModelParams>,
}

impl Sgd {
    pub fn new(lr: f64, momentum: f64) -> Self {
        Self {
            lr,
            momentum,
            velocity: None,
        }
    }

    pub fn step(&mut self, params: &mut ModelParams, grad: &ModelParams) {
        if self.momentum == 0.0 {
            params.axpy(-self.lr, grad);
            return;
        }
        let v = self.velocity.get_or_insert_with(|| grad.zeros_like());
        // v <- momentum * v + grad
        let mut scaled = v.zeros_like();
        scaled.axpy(self.momentum, v);
        scaled.axpy(1.0, grad);
        *v = scaled;
        params.axpy(-self.lr, v);
    }
}
