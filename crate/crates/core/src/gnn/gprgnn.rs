//! GPRGNN: a two-layer MLP followed by a learnable polynomial in `S`,
//! `logits = sum_k gamma_k S^k mlp(X)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GprgnnParams {
    pub mlp_w1: DMatrix<f64>,
    pub mlp_w2: DMatrix<f64>,
    /// `K + 1` propagation weights.
    pub gpr_coeffs: DVector<f64>,
}

impl GprgnnParams {
    pub fn hops(&self) -> usize {
        self.gpr_coeffs.len().saturating_sub(1)
    }
}

pub(crate) struct GprCache {
    pre: DMatrix<f64>,
    hidden: DMatrix<f64>,
    /// `z_k = S^k h0` for `k = 0..=K`.
    powers: Vec<DMatrix<f64>>,
}

fn check_shapes(params: &GprgnnParams, s: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<()> {
    if s.nrows() != s.ncols() || s.nrows() != x.nrows() {
        return Err(Error::shape("gprgnn adjacency", format!("{0}x{0}", x.nrows()), format!("{:?}", s.shape())));
    }
    if params.mlp_w1.nrows() != x.ncols() {
        return Err(Error::shape("gprgnn mlp_w1 rows", x.ncols(), params.mlp_w1.nrows()));
    }
    if params.mlp_w2.nrows() != params.mlp_w1.ncols() {
        return Err(Error::shape("gprgnn mlp_w2 rows", params.mlp_w1.ncols(), params.mlp_w2.nrows()));
    }
    if params.gpr_coeffs.len() < 2 {
        return Err(Error::Parameter("GPRGNN needs K >= 1".into()));
    }
    Ok(())
}

pub(crate) fn mlp(params: &GprgnnParams, x: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let pre = x * &params.mlp_w1;
    let hidden = pre.map(|v| v.max(0.0));
    let h0 = &hidden * &params.mlp_w2;
    (pre, hidden, h0)
}

pub(crate) fn forward_cached(
    params: &GprgnnParams,
    s: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, GprCache)> {
    check_shapes(params, s, x)?;
    let (pre, hidden, h0) = mlp(params, x);
    let mut powers = Vec::with_capacity(params.gpr_coeffs.len());
    let mut logits = &h0 * params.gpr_coeffs[0];
    powers.push(h0);
    for k in 1..params.gpr_coeffs.len() {
        let next = s * &powers[k - 1];
        logits += &next * params.gpr_coeffs[k];
        powers.push(next);
    }
    Ok((logits, GprCache { pre, hidden, powers }))
}

pub fn gprgnn_forward(params: &GprgnnParams, a_norm: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(forward_cached(params, a_norm, x)?.0)
}

pub(crate) fn backward(
    params: &GprgnnParams,
    s: &DMatrix<f64>,
    x: &DMatrix<f64>,
    cache: &GprCache,
    grad_logits: &DMatrix<f64>,
    want_grad_s: bool,
) -> (GprgnnParams, Option<DMatrix<f64>>) {
    let big_k = params.hops();
    let gamma = &params.gpr_coeffs;
    let grad_gamma = DVector::from_iterator(
        big_k + 1,
        cache.powers.iter().map(|z| z.dot(grad_logits)),
    );

    // adjoints: a_K = gamma_K G, a_{k-1} = gamma_{k-1} G + S^T a_k
    let n = s.nrows();
    let mut grad_s = want_grad_s.then(|| DMatrix::zeros(n, n));
    let mut adj = grad_logits * gamma[big_k];
    for k in (1..=big_k).rev() {
        if let Some(gs) = grad_s.as_mut() {
            gs.gemm(1.0, &adj, &cache.powers[k - 1].transpose(), 1.0);
        }
        let mut prev = s.tr_mul(&adj);
        prev += grad_logits * gamma[k - 1];
        adj = prev;
    }
    let grad_h0 = adj;

    let w2 = cache.hidden.tr_mul(&grad_h0);
    let mut grad_pre = &grad_h0 * params.mlp_w2.transpose();
    grad_pre.zip_apply(&cache.pre, |g, p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
    let w1 = x.tr_mul(&grad_pre);
    (
        GprgnnParams {
            mlp_w1: w1,
            mlp_w2: w2,
            gpr_coeffs: grad_gamma,
        },
        grad_s,
    )
}
