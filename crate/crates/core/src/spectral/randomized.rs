//! Randomized SVD with power iteration.
//!
//! Range finder: `Y = A * Omega`, sharpened by `Y <- A (A^T Y)` repeated `q`
//! times, then `Q = qr(Y)`, `B = Q^T A`, `B = U_B S V^T` and `U = Q U_B`.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::svd::SvdFactors;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RndSvdConfig {
    /// Target rank.
    pub k: usize,
    /// Oversampling columns.
    #[serde(default = "default_oversampling")]
    pub p: usize,
    /// Power iterations.
    #[serde(default = "default_power_iterations")]
    pub q: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_oversampling() -> usize {
    5
}

fn default_power_iterations() -> usize {
    1
}

impl RndSvdConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            p: default_oversampling(),
            q: default_power_iterations(),
            seed,
        }
    }

    pub fn sketch_width(&self) -> usize {
        self.k + self.p
    }
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng::stream(seed, "rndsvd.omega");
    // fill column-major so the draw order matches storage order
    let data: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(&mut rng)).collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Rank-`(k + p)` factors of `a` (square, not necessarily symmetric).
pub fn randomized_svd(a: &DMatrix<f64>, cfg: &RndSvdConfig) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    if m != n {
        return Err(Error::shape("randomized_svd", "square matrix", format!("{m}x{n}")));
    }
    let width = cfg.sketch_width();
    if cfg.k == 0 || width > n {
        return Err(Error::Parameter(format!(
            "need 1 <= k and k + p <= n, got k = {}, p = {}, n = {n}",
            cfg.k, cfg.p
        )));
    }

    let omega = gaussian_matrix(n, width, cfg.seed);
    let mut y = a * omega;
    let at = a.transpose();
    for _ in 0..cfg.q {
        y = a * (&at * &y);
    }
    let q = y.qr().q();
    let b = q.transpose() * a;

    // SVD of the thin transpose is cheaper to drive than the wide matrix
    let svd = b.transpose().svd(true, true);
    let (vb, ub_t) = (
        svd.u.expect("requested u"),
        svd.v_t.expect("requested v_t"),
    );
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
    let ub = ub_t.transpose();
    let sigma = DVector::from_iterator(order.len(), order.iter().map(|&i| s[i]));
    let ub_sorted = ub.select_columns(order.iter());
    let v = vb.select_columns(order.iter());
    let u = &q * ub_sorted;
    Ok(SvdFactors { u, sigma, v })
}
