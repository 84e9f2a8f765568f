use nalgebra::DMatrix;
use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::rng;

/// Relative cutoff below which singular values are treated as zero.
pub const PINV_TOLERANCE: f64 = 1e-10;

/// Moore–Penrose pseudo-inverse through the SVD; singular values below
/// `tol * sigma_max` are dropped.
pub fn pseudo_inverse(w: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let (m, n) = w.shape();
    if m != n {
        return Err(Error::shape("pseudo_inverse", "square matrix", format!("{m}x{n}")));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let svd = w.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    let mut out = DMatrix::zeros(n, n);
    if smax <= 0.0 {
        return Ok(out);
    }
    let u = svd.u.as_ref().expect("requested u");
    let vt = svd.v_t.as_ref().expect("requested v_t");
    for k in 0..s.len() {
        if s[k] > tol * smax {
            // out += v_k * u_k^T / s_k
            out.ger(1.0 / s[k], &vt.row(k).transpose(), &u.column(k), 1.0);
        }
    }
    Ok(out)
}

/// Sampled column indices used by [`nystrom_approx`] for a given seed.
pub fn nystrom_columns(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, "nystrom.columns");
    sample(&mut rng, n, k).into_vec()
}

/// Nyström reconstruction `C W^+ C^T` from `k` uniformly sampled columns.
pub fn nystrom_approx(a: &DMatrix<f64>, k: usize, seed: u64) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    if m != n {
        return Err(Error::shape("nystrom_approx", "square matrix", format!("{m}x{n}")));
    }
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("nystrom rank k = {k} outside 1..={n}")));
    }
    let cols = nystrom_columns(n, k, seed);
    nystrom_from_columns(a, &cols)
}

/// Nyström reconstruction for an explicit column set.
pub fn nystrom_from_columns(a: &DMatrix<f64>, cols: &[usize]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if let Some(&bad) = cols.iter().find(|&&c| c >= n) {
        return Err(Error::Index(format!("column {bad} with n = {n}")));
    }
    let c = a.select_columns(cols.iter());
    let w = c.select_rows(cols.iter());
    let w_pinv = pseudo_inverse(&w, PINV_TOLERANCE)?;
    let left = &c * w_pinv;
    let approx = left * c.transpose();
    Ok((&approx + approx.transpose()) * 0.5)
}
