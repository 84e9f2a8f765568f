//! Randomized SVD accuracy: exact recovery of low-rank input and the effect
//! of power iterations on a slowly decaying spectrum.

use gse_at::spectral::{full_svd, randomized_svd, RndSvdConfig};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn orthonormal(n: usize, k: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(&mut rng));
    g.qr().q()
}

fn symmetric_with_spectrum(n: usize, spectrum: &[f64], seed: u64) -> DMatrix<f64> {
    let q = orthonormal(n, spectrum.len(), seed);
    &q * DMatrix::from_diagonal(&DVector::from_column_slice(spectrum)) * q.transpose()
}

fn main() -> gse_at::Result<()> {
    let n = 300;
    let low_rank = symmetric_with_spectrum(n, &[9.0, 7.0, 5.0, 3.0, 2.0, 1.0], 1);
    let f = randomized_svd(&low_rank, &RndSvdConfig::new(6, 0))?;
    let rel = (f.reconstruct() - &low_rank).norm() / low_rank.norm();
    println!("rank-6 input, k = 6, p = 5, q = 1: relative error {rel:.2e}");

    let slow: Vec<f64> = (1..=n).map(|i| 1.0 / (i as f64).sqrt()).collect();
    let a = symmetric_with_spectrum(n, &slow, 2);
    let best = full_svd(&a)?.truncate(20).reconstruct();
    let best_err = (&best - &a).norm();
    println!("slow decay, k = 20, best rank-20 error {best_err:.4}");
    for q in 0..=3 {
        let cfg = RndSvdConfig { q, ..RndSvdConfig::new(20, 5) };
        let err = (randomized_svd(&a, &cfg)?.truncate(20).reconstruct() - &a).norm();
        println!("  q = {q}: error {err:.4} ({:.3}x optimal)", err / best_err);
    }
    Ok(())
}
