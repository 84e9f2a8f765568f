//! Graph subspace energy and the offset proximal step on a small graph.
//!
//! Run with `cargo run --release --example spectral_basics`.

use gse_at::graph::{sbm_generate, SbmConfig};
use gse_at::spectral::{
    alpha_budget, full_svd, gse, gse_offset_prox, normalized_gse, singular_spectrum, window, GseParams, SvdBackend,
};
use nalgebra::DMatrix;

fn main() -> gse_at::Result<()> {
    let graph = sbm_generate(&SbmConfig {
        block_sizes: vec![20, 20],
        p_in: 0.25,
        p_out: 0.03,
        feature_dim: 2,
        feature_shift: 1.0,
        seed: 7,
    })?;
    let a = graph.dense_adjacency();
    let n = graph.n();

    let params = GseParams {
        alpha: alpha_budget(0.1 * graph.edge_count() as f64, n)?,
        ..GseParams::default()
    };
    let (k1, k2) = window(n, params.beta1, params.beta2);
    println!("n = {n}, {} edges, window = singular values {}..={k2}", graph.edge_count(), k1 + 1);
    println!("alpha = {:.4}", params.alpha);

    let sigma = singular_spectrum(&a)?;
    println!("top five singular values: {:.3?}", &sigma[..5]);
    println!("GSE = {:.4}", gse(&a, params.beta1, params.beta2)?);

    let prox = gse_offset_prox(&a, &params, &SvdBackend::Exact)?;
    let after = singular_spectrum(&prox)?;
    println!(
        "after the prox: GSE = {:.4} (window gained {:.4}), rank <= {k2}, sigma_(k2+1) = {:.2e}",
        gse(&prox, params.beta1, params.beta2)?,
        after[k1..k2].iter().sum::<f64>() - sigma[k1..k2].iter().sum::<f64>(),
        after[k2]
    );

    // energy of a graph with extra random-looking edges, relative to the clean one
    let mut noisy = a.clone();
    for i in 0..n {
        let j = (i * 7 + 3) % n;
        if i != j {
            noisy[(i, j)] = 1.0;
            noisy[(j, i)] = 1.0;
        }
    }
    println!("normalized GSE with {} extra pairs: {:.4}", n, normalized_gse(&a, &noisy, 0.1, 0.5)?);

    // exact factors reconstruct the input
    let f = full_svd(&a)?;
    let err: DMatrix<f64> = f.reconstruct() - &a;
    println!("exact SVD reconstruction error: {:.2e}", err.amax());
    Ok(())
}
