use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `D^{-1/2} (A + I) D^{-1/2}` together with the inverse square-root degrees,
/// which the backward pass needs.
#[derive(Debug, Clone)]
pub struct NormalizedAdjacency {
    pub matrix: DMatrix<f64>,
    pub inv_sqrt_degree: DVector<f64>,
    pub degree: DVector<f64>,
}

pub fn normalize_with_degrees(a: &DMatrix<f64>) -> Result<NormalizedAdjacency> {
    let (n, m) = a.shape();
    if n != m {
        return Err(Error::shape("normalize_adjacency", "square matrix", format!("{n}x{m}")));
    }
    if let Some(bad) = a.iter().find(|&&v| !(v >= 0.0)) {
        return Err(Error::Domain(format!("adjacency entry {bad} is negative or NaN")));
    }
    let degree = DVector::from_iterator(n, (0..n).map(|i| a.row(i).sum() + 1.0));
    let inv_sqrt_degree = degree.map(|d| 1.0 / d.sqrt());
    let mut matrix = a.clone();
    for i in 0..n {
        matrix[(i, i)] += 1.0;
    }
    for j in 0..n {
        let rj = inv_sqrt_degree[j];
        for i in 0..n {
            matrix[(i, j)] *= inv_sqrt_degree[i] * rj;
        }
    }
    Ok(NormalizedAdjacency {
        matrix,
        inv_sqrt_degree,
        degree,
    })
}

/// Symmetric renormalization with self-loops, `D^{-1/2} (A + I) D^{-1/2}`,
/// where `D` is the degree matrix of `A + I`.
pub fn normalize_adjacency(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(normalize_with_degrees(a)?.matrix)
}

/// Chain rule through the normalization.
///
/// Given `dL/dS` for the normalized matrix `S`, returns `dL/dA` treating
/// every entry of `A` as an independent variable.
pub(crate) fn normalization_backward(grad_s: &DMatrix<f64>, norm: &NormalizedAdjacency) -> DMatrix<f64> {
    let n = grad_s.nrows();
    let s = &norm.matrix;
    let r = &norm.inv_sqrt_degree;
    // dL/dd_k = -(sum_j M_kj + sum_i M_ik) / (2 d_k), M = dS .* S
    let m = grad_s.component_mul(s);
    let mut grad_degree = DVector::zeros(n);
    for k in 0..n {
        grad_degree[k] = -(m.row(k).sum() + m.column(k).sum()) / (2.0 * norm.degree[k]);
    }
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            out[(i, j)] = grad_s[(i, j)] * r[i] * r[j] + grad_degree[i];
        }
    }
    out
}

/// Gradient with respect to undirected pair weights: `G + G^T` off the
/// diagonal, `G` on it. Exactly symmetric.
pub(crate) fn pair_gradient(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        out[(j, j)] = g[(j, j)];
        for i in 0..j {
            let v = g[(i, j)] + g[(j, i)];
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}
