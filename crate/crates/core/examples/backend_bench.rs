//! Median time per call of the exact, randomized and Nyström backends.
//!
//! `cargo run --release --example backend_bench -- 1000 50 5` (n, k, reps).

use gse_at::experiment::{bench_backends, bench_csv};

fn main() -> gse_at::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(1000);
    let k = args.get(1).copied().unwrap_or(50);
    let reps = args.get(2).copied().unwrap_or(5);
    let rows = bench_backends(n, k, reps, 0)?;
    print!("{}", bench_csv(&rows));
    let t = |name: &str| rows.iter().find(|r| r.backend == name).map(|r| r.median).unwrap_or(f64::NAN);
    println!(
        "rndsvd is {:.1}x faster than exact; nystrom is {:.1}x faster than rndsvd",
        t("exact") / t("rndsvd"),
        t("rndsvd") / t("nystrom")
    );
    Ok(())
}
