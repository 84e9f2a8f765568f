//! Singular-value curves and normalized GSE under growing attack budgets,
//! written as CSV files.

use gse_at::experiment::{emit_spectrum_report, spectrum_report, SpectrumAttack};
use gse_at::gnn::ModelConfig;
use gse_at::graph::{sbm_generate, SbmConfig};
use gse_at::training::TrainConfig;

fn main() -> gse_at::Result<()> {
    let graph = sbm_generate(&SbmConfig::homophilic_desk(0))?;
    let budgets = [0.05, 0.10, 0.25];
    let attack = SpectrumAttack::Rbcd {
        model: ModelConfig::gcn(),
        train: TrainConfig {
            epochs: 100,
            warmup: 0,
            lr: 0.4,
            ..Default::default()
        },
        iterations: 30,
    };
    let report = spectrum_report(&graph, &budgets, 0, &attack, 0.1, 0.5)?;
    let dir = std::env::temp_dir().join("gse_at_spectrum");
    for f in emit_spectrum_report(&report, &dir)? {
        println!("wrote {}", f.display());
    }
    print!("{}", report.ngse_csv());
    Ok(())
}
