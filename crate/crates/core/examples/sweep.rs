//! Seeded sweep from a JSON config, printed as CSV with mean and std rows.
//!
//! `cargo run --release --example sweep -- examples/configs/sweep_small.json`

use std::path::PathBuf;

use gse_at::experiment::{run_experiment, ExperimentConfig};

fn main() -> gse_at::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/sweep_small.json")));
    let cfg = ExperimentConfig::from_json_file(&path)?;
    let table = run_experiment(&cfg, 1)?;
    print!("{}", table.to_csv());
    Ok(())
}
