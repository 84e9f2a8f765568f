//! Nyström reconstruction from sampled columns.

use gse_at::experiment::random_sparse_symmetric;
use gse_at::spectral::{full_svd, nystrom_approx, nystrom_columns, nystrom_from_columns};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> gse_at::Result<()> {
    // positive semidefinite rank-3 matrix: any 3 independent columns suffice
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b: DMatrix<f64> = DMatrix::from_fn(40, 3, |_, _| StandardNormal.sample(&mut rng));
    let psd = &b * b.transpose();
    let cols = nystrom_columns(40, 3, 11);
    let err = (nystrom_from_columns(&psd, &cols)? - &psd).amax();
    println!("rank-3 PSD from columns {cols:?}: max error {err:.2e}");

    // adjacency-like input: error against the best rank-k approximation
    let a = random_sparse_symmetric(400, 6.0, 3) + DMatrix::identity(400, 400) * 4.0;
    let exact = full_svd(&a)?;
    for k in [40, 100, 200, 400] {
        let approx = nystrom_approx(&a, k, 5)?;
        let best = (exact.truncate(k).reconstruct() - &a).norm();
        println!(
            "k = {k:3}: Nyström error {:.3}, best rank-k error {best:.3}",
            (approx - &a).norm()
        );
    }
    Ok(())
}
