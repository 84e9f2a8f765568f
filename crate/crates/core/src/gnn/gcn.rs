//! Two-layer GCN: `logits = S relu(S X W1) W2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GcnParams {
    /// `d x h`
    pub w1: DMatrix<f64>,
    /// `h x C`
    pub w2: DMatrix<f64>,
}

pub(crate) struct GcnCache {
    xw: DMatrix<f64>,
    pre: DMatrix<f64>,
    hidden: DMatrix<f64>,
    hw: DMatrix<f64>,
}

fn check_shapes(params: &GcnParams, s: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<()> {
    if s.nrows() != s.ncols() || s.nrows() != x.nrows() {
        return Err(Error::shape("gcn adjacency", format!("{0}x{0}", x.nrows()), format!("{:?}", s.shape())));
    }
    if params.w1.nrows() != x.ncols() {
        return Err(Error::shape("gcn w1 rows", x.ncols(), params.w1.nrows()));
    }
    if params.w2.nrows() != params.w1.ncols() {
        return Err(Error::shape("gcn w2 rows", params.w1.ncols(), params.w2.nrows()));
    }
    Ok(())
}

pub(crate) fn forward_cached(
    params: &GcnParams,
    s: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, GcnCache)> {
    check_shapes(params, s, x)?;
    let xw = x * &params.w1;
    let pre = s * &xw;
    let hidden = pre.map(|v| v.max(0.0));
    let hw = &hidden * &params.w2;
    let logits = s * &hw;
    Ok((logits, GcnCache { xw, pre, hidden, hw }))
}

pub fn gcn_forward(params: &GcnParams, a_norm: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(forward_cached(params, a_norm, x)?.0)
}

/// Returns parameter gradients and, if asked, `dL/dS`.
pub(crate) fn backward(
    params: &GcnParams,
    s: &DMatrix<f64>,
    x: &DMatrix<f64>,
    cache: &GcnCache,
    grad_logits: &DMatrix<f64>,
    want_grad_s: bool,
) -> (GcnParams, Option<DMatrix<f64>>) {
    // S is symmetric, so S^T G = S G
    let gs = s.tr_mul(grad_logits);
    let w2 = cache.hidden.tr_mul(&gs);
    let mut grad_pre = &gs * params.w2.transpose();
    // relu'(0) = 0
    grad_pre.zip_apply(&cache.pre, |g, p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
    let gp = s.tr_mul(&grad_pre);
    let w1 = x.tr_mul(&gp);
    let grad_s = want_grad_s.then(|| grad_logits * cache.hw.transpose() + &grad_pre * cache.xw.transpose());
    (GcnParams { w1, w2 }, grad_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_zero_logits() {
        let p = GcnParams {
            w1: DMatrix::zeros(3, 4),
            w2: DMatrix::zeros(4, 2),
        };
        let s = DMatrix::identity(5, 5);
        let x = DMatrix::from_fn(5, 3, |i, j| (i + j) as f64);
        assert_eq!(gcn_forward(&p, &s, &x).unwrap(), DMatrix::zeros(5, 2));
    }

    #[test]
    fn identity_propagation_passes_nonnegative_features() {
        let p = GcnParams {
            w1: DMatrix::identity(3, 3),
            w2: DMatrix::identity(3, 2),
        };
        let s = DMatrix::identity(4, 4);
        let x = DMatrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64);
        let logits = gcn_forward(&p, &s, &x).unwrap();
        assert_eq!(logits, x.columns(0, 2).into_owned());
    }

    #[test]
    fn shape_mismatch() {
        let p = GcnParams {
            w1: DMatrix::zeros(2, 4),
            w2: DMatrix::zeros(4, 2),
        };
        let s = DMatrix::identity(3, 3);
        assert!(gcn_forward(&p, &s, &DMatrix::zeros(3, 5)).is_err());
    }
}
