//! Singular-value machinery for symmetric adjacency matrices.
//!
//! Exact factors come from a symmetric eigendecomposition. The randomized
//! range finder and the Nyström reconstruction provide the cheap
//! alternatives used by the scalable training loops.

mod gse;
mod nystrom;
mod randomized;
mod svd;

pub use gse::{
    alpha_budget, gse, gse_of_spectrum, gse_offset_prox, normalized_gse, offset_spectrum, window,
    GseParams, SvdBackend,
};
pub use nystrom::{nystrom_approx, nystrom_columns, nystrom_from_columns, pseudo_inverse, PINV_TOLERANCE};
pub use randomized::{randomized_svd, RndSvdConfig};
pub use svd::{full_svd, hoffman_wielandt_gap, singular_spectrum, SvdFactors};

use nalgebra::DMatrix;

/// Rows of `index,value` with the given header, for plotting.
pub fn spectrum_csv(header: &str, values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    out.push_str(header);
    out.push('\n');
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{:.12e}\n", i + 1, v));
    }
    out
}

/// Dense row-major CSV dump.
pub fn matrix_csv(a: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{:e}", a[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
