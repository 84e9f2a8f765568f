//! Analytic versus central-difference gradients for both backbones,
//! including the gradient with respect to the adjacency weights.

use gse_at::gnn::{loss_and_grads, loss_with, GradRequest, ModelConfig, ModelParams};
use nalgebra::DMatrix;

fn main() -> gse_at::Result<()> {
    let n = 12;
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.1 + 0.8 * (((i + 1) * (j + 1)) % 5) as f64 / 5.0 });
    let x = DMatrix::from_fn(n, 4, |i, j| ((i * 4 + j) as f64 * 0.61).cos());
    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let mask: Vec<bool> = (0..n).map(|i| i % 4 != 0).collect();
    let none = GradRequest { params: false, adjacency: false };
    let h = 1e-5;

    let mut gpr = ModelConfig::gprgnn().with_hidden(5);
    gpr.hops = 3;
    for cfg in [ModelConfig::gcn().with_hidden(5), gpr] {
        let params = ModelParams::init(&cfg, 4, 3, 1)?;
        let bundle = loss_and_grads(&params, &a, &x, &labels, &mask)?;

        let flat = params.to_flat();
        let analytic = bundle.grad_params.to_flat();
        let mut worst: f64 = 0.0;
        for k in 0..flat.len() {
            let shifted = |delta: f64| -> gse_at::Result<f64> {
                let mut p = params.clone();
                let mut v = flat.clone();
                v[k] += delta;
                p.set_flat(&v)?;
                Ok(loss_with(&p, &a, &x, &labels, &mask, none)?.loss)
            };
            let fd = (shifted(h)? - shifted(-h)?) / (2.0 * h);
            worst = worst.max((fd - analytic[k]).abs() / fd.abs().max(analytic[k].abs()).max(1e-6));
        }

        let mut worst_adj: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let mut b = a.clone();
                let mut at = |v: f64| -> gse_at::Result<f64> {
                    b[(i, j)] = v;
                    b[(j, i)] = v;
                    Ok(loss_with(&params, &b, &x, &labels, &mask, none)?.loss)
                };
                let fd = (at(a[(i, j)] + h)? - at(a[(i, j)] - h)?) / (2.0 * h);
                let an = bundle.grad_adjacency[(i, j)];
                worst_adj = worst_adj.max((fd - an).abs() / fd.abs().max(an.abs()).max(1e-6));
            }
        }
        println!(
            "{}: {} parameters, worst relative error {worst:.2e}; adjacency pairs worst {worst_adj:.2e}",
            cfg.kind,
            flat.len()
        );
    }
    Ok(())
}
