use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{apply_perturbation, Graph, Perturbation};
use crate::rng;
use crate::spectral::gse;

#[derive(Debug, Clone)]
pub struct RndGseResult {
    pub perturbation: Perturbation,
    /// GSE of the selected perturbed graph.
    pub gse: f64,
    /// GSE of every sampled candidate, in sampling order.
    pub candidate_gse: Vec<f64>,
}

/// `budget` distinct uniformly random node pairs.
pub fn random_perturbation(n: usize, budget: usize, rng: &mut impl Rng) -> Result<Perturbation> {
    let total = n * n.saturating_sub(1) / 2;
    if budget > total {
        return Err(Error::Parameter(format!("budget {budget} exceeds the {total} node pairs")));
    }
    let mut p = Perturbation::new(budget);
    while p.len() < budget {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            p.insert(i, j)?;
        }
    }
    Ok(p)
}

/// Samples `trials` random `budget`-flip perturbations and keeps the one whose
/// perturbed graph has the largest GSE over `[beta1, beta2]`. Ties keep the
/// earliest candidate.
pub fn rnd_gse_attack(
    graph: &Graph,
    budget: usize,
    trials: usize,
    beta1: f64,
    beta2: f64,
    seed: u64,
) -> Result<RndGseResult> {
    if trials == 0 {
        return Err(Error::Parameter("rnd_gse_attack needs trials >= 1".into()));
    }
    if budget == 0 {
        return Err(Error::Parameter("rnd_gse_attack needs budget >= 1".into()));
    }
    let mut rng = rng::stream(seed, "attack.rnd_gse");
    let mut best: Option<(Perturbation, f64)> = None;
    let mut candidate_gse = Vec::with_capacity(trials);
    for _ in 0..trials {
        let p = random_perturbation(graph.n(), budget, &mut rng)?;
        let value = gse(&apply_perturbation(graph, &p)?.dense_adjacency(), beta1, beta2)?;
        candidate_gse.push(value);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((p, value));
        }
    }
    let (perturbation, gse) = best.expect("trials >= 1");
    Ok(RndGseResult {
        perturbation,
        gse,
        candidate_gse,
    })
}
