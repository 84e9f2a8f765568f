use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Thin singular value decomposition `u * diag(sigma) * v^T`.
///
/// `sigma` is sorted in descending order and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.reconstruct_with(self.sigma.as_slice())
    }

    /// `u[:, ..s.len()] * diag(s) * v[:, ..s.len()]^T`.
    pub fn reconstruct_with(&self, s: &[f64]) -> DMatrix<f64> {
        let r = s.len().min(self.rank());
        let mut us = self.u.columns(0, r).into_owned();
        for (k, &sk) in s.iter().take(r).enumerate() {
            us.column_mut(k).scale_mut(sk);
        }
        us * self.v.columns(0, r).transpose()
    }

    /// Keeps the `r` leading triplets.
    pub fn truncate(&self, r: usize) -> SvdFactors {
        let r = r.min(self.rank());
        SvdFactors {
            u: self.u.columns(0, r).into_owned(),
            sigma: self.sigma.rows(0, r).into_owned(),
            v: self.v.columns(0, r).into_owned(),
        }
    }
}

fn require_square(a: &DMatrix<f64>, context: &'static str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::shape(context, "square matrix", format!("{}x{}", a.nrows(), a.ncols())));
    }
    Ok(())
}

/// Fails unless `a` is square and symmetric to within `1e-10` relative to its
/// largest entry.
pub(crate) fn require_symmetric(a: &DMatrix<f64>, context: &'static str) -> Result<()> {
    require_square(a, context)?;
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    for j in 0..n {
        for i in 0..j {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::Domain(format!(
                    "{context}: matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Exact SVD of a symmetric matrix through its eigendecomposition.
///
/// With `a = Q diag(lambda) Q^T`, the singular values are `|lambda|`, the left
/// vectors are the eigenvectors and the right vectors are the eigenvectors
/// with the sign of negative-eigenvalue columns flipped.
pub fn full_svd(a: &DMatrix<f64>) -> Result<SvdFactors> {
    require_symmetric(a, "full_svd")?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SvdFactors {
            u: DMatrix::zeros(0, 0),
            sigma: DVector::zeros(0),
            v: DMatrix::zeros(0, 0),
        });
    }
    let eig = a.clone().symmetric_eigen();
    let order = descending_by_magnitude(eig.eigenvalues.as_slice());

    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    let mut sigma = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        let col = eig.eigenvectors.column(src);
        sigma[dst] = lambda.abs();
        u.set_column(dst, &col);
        if lambda < 0.0 {
            v.set_column(dst, &(-col));
        } else {
            v.set_column(dst, &col);
        }
    }
    Ok(SvdFactors { u, sigma, v })
}

fn descending_by_magnitude(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // ties keep eigen-solver order, so output is deterministic
    order.sort_by(|&x, &y| values[y].abs().total_cmp(&values[x].abs()));
    order
}

/// All singular values of a symmetric matrix, descending.
pub fn singular_spectrum(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    require_symmetric(a, "singular_spectrum")?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut s: Vec<f64> = a.clone().symmetric_eigenvalues().iter().map(|l| l.abs()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Both sides of the Hoffman–Wielandt inequality for symmetric `a` and `e`:
/// `sum_k (sigma_k(a + e) - sigma_k(a))^2` and `||e||_F^2`.
pub fn hoffman_wielandt_gap(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<(f64, f64)> {
    if a.shape() != e.shape() {
        return Err(Error::shape(
            "hoffman_wielandt_gap",
            format!("{:?}", a.shape()),
            format!("{:?}", e.shape()),
        ));
    }
    let before = singular_spectrum(a)?;
    let after = singular_spectrum(&(a + e))?;
    let lhs = before.iter().zip(&after).map(|(s, t)| (t - s).powi(2)).sum();
    Ok((lhs, e.norm_squared()))
}
