use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::spectral::{full_svd, nystrom_approx, randomized_svd, RndSvdConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub backend: &'static str,
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    /// Median seconds per call.
    pub median: f64,
}

/// Random 0/1 symmetric matrix with zero diagonal and about `avg_degree`
/// nonzeros per row.
pub fn random_sparse_symmetric(n: usize, avg_degree: f64, seed: u64) -> DMatrix<f64> {
    let p = if n > 1 { (avg_degree / (n - 1) as f64).clamp(0.0, 1.0) } else { 0.0 };
    let mut r = rng::stream(seed, "bench.matrix");
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(p) {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
        }
    }
    a
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn time_reps(reps: usize, mut f: impl FnMut(u64) -> Result<()>) -> Result<f64> {
    let mut times = Vec::with_capacity(reps);
    for r in 0..reps {
        let t = Instant::now();
        f(r as u64)?;
        times.push(t.elapsed().as_secs_f64());
    }
    Ok(median(times))
}

/// Median wall time of the exact SVD, the randomized SVD (rank `k`,
/// default oversampling and power iterations) and the Nyström reconstruction
/// (`k` columns) on a random sparse symmetric `n x n` matrix.
pub fn bench_backends(n: usize, k: usize, reps: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("bench rank k = {k} not in 1..={n}")));
    }
    if reps == 0 {
        return Err(Error::Parameter("bench needs reps >= 1".into()));
    }
    let a = random_sparse_symmetric(n, 4.0, seed);
    let mut cfg = RndSvdConfig::new(k, seed);
    // keep the sketch inside the matrix for tiny n
    cfg.p = cfg.p.min(n - k);
    let exact = time_reps(reps, |_| full_svd(&a).map(|_| ()))?;
    let rnd = time_reps(reps, |r| {
        randomized_svd(&a, &RndSvdConfig { seed: seed ^ r, ..cfg }).map(|_| ())
    })?;
    let nys = time_reps(reps, |r| nystrom_approx(&a, k, seed ^ r).map(|_| ()))?;
    let row = |backend, median| BenchRow {
        backend,
        n,
        k,
        reps,
        median,
    };
    Ok(vec![row("exact", exact), row("rndsvd", rnd), row("nystrom", nys)])
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("backend,n,k,reps,median_seconds\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{:.6e}\n", r.backend, r.n, r.k, r.reps, r.median));
    }
    out
}
