//! Shared oracles for the integration and acceptance targets.
#![allow(dead_code)]

use gse_at::gnn::{loss_and_grads, loss_with, GradRequest, ModelParams};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// Small classification instance with a strictly positive weighted adjacency
/// so that central differences never leave the domain.
pub struct Instance {
    pub a: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub labels: Vec<usize>,
    pub mask: Vec<bool>,
}

pub fn gradient_instance(n: usize, d: usize, classes: usize, seed: u64) -> Instance {
    let mut r = rng(seed);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            // mostly weak links with a few strong ones
            let w = if r.random_bool(0.3) { r.random_range(0.5..1.0) } else { r.random_range(0.02..0.2) };
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
    }
    let x = DMatrix::from_fn(n, d, |_, _| r.random_range(-1.0..1.0));
    let labels = (0..n).map(|_| r.random_range(0..classes)).collect();
    let mask = (0..n).map(|i| i % 3 != 2).collect();
    Instance { a, x, labels, mask }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct GradCheck {
    pub significant: usize,
    pub passed: usize,
    pub worst: f64,
}

impl GradCheck {
    fn record(&mut self, analytic: f64, numeric: f64, tol: f64) {
        let scale = analytic.abs().max(numeric.abs());
        if scale <= 1e-6 {
            return;
        }
        let rel = (analytic - numeric).abs() / scale;
        self.significant += 1;
        if rel <= tol {
            self.passed += 1;
        }
        self.worst = self.worst.max(rel);
    }

    pub fn fraction(&self) -> f64 {
        if self.significant == 0 {
            1.0
        } else {
            self.passed as f64 / self.significant as f64
        }
    }
}

/// Central differences over every parameter coordinate.
pub fn check_param_gradients(params: &ModelParams, inst: &Instance, step: f64, tol: f64) -> GradCheck {
    let analytic = loss_and_grads(params, &inst.a, &inst.x, &inst.labels, &inst.mask)
        .unwrap()
        .grad_params
        .to_flat();
    let base = params.to_flat();
    let loss_at = |flat: &[f64]| {
        let mut p = params.clone();
        p.set_flat(flat).unwrap();
        loss_with(&p, &inst.a, &inst.x, &inst.labels, &inst.mask, GradRequest { params: false, adjacency: false })
            .unwrap()
            .loss
    };
    let mut check = GradCheck::default();
    let mut flat = base.clone();
    for k in 0..base.len() {
        flat[k] = base[k] + step;
        let up = loss_at(&flat);
        flat[k] = base[k] - step;
        let down = loss_at(&flat);
        flat[k] = base[k];
        check.record(analytic[k], (up - down) / (2.0 * step), tol);
    }
    check
}

/// Central differences over every undirected pair weight (both mirror entries
/// move together) and every diagonal entry.
pub fn check_adjacency_gradients(params: &ModelParams, inst: &Instance, step: f64, tol: f64) -> GradCheck {
    let analytic = loss_and_grads(params, &inst.a, &inst.x, &inst.labels, &inst.mask)
        .unwrap()
        .grad_adjacency;
    let loss_at = |a: &DMatrix<f64>| {
        loss_with(params, a, &inst.x, &inst.labels, &inst.mask, GradRequest { params: false, adjacency: false })
            .unwrap()
            .loss
    };
    let n = inst.a.nrows();
    let mut check = GradCheck::default();
    let mut a = inst.a.clone();
    for i in 0..n {
        for j in i..n {
            let orig = a[(i, j)];
            let set = |a: &mut DMatrix<f64>, v: f64| {
                a[(i, j)] = v;
                a[(j, i)] = v;
            };
            set(&mut a, orig + step);
            let up = loss_at(&a);
            set(&mut a, orig - step);
            let down = loss_at(&a);
            set(&mut a, orig);
            check.record(analytic[(i, j)], (up - down) / (2.0 * step), tol);
        }
    }
    check
}
