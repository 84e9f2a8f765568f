use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = logits.clone();
    for i in 0..out.nrows() {
        let mut row = out.row_mut(i);
        let max = row.max();
        row.apply(|v| *v = (*v - max).exp());
        let z = row.sum();
        row /= z;
    }
    out
}

fn masked_count(mask: &[bool]) -> Result<usize> {
    let m = mask.iter().filter(|&&b| b).count();
    if m == 0 {
        return Err(Error::Evaluation("mask selects no nodes".into()));
    }
    Ok(m)
}

fn log_softmax_at(logits: &DMatrix<f64>, i: usize, class: usize) -> f64 {
    let row = logits.row(i);
    let max = row.max();
    let lse = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
    logits[(i, class)] - lse
}

/// Mean negative log-likelihood over the masked nodes.
pub fn masked_cross_entropy(logits: &DMatrix<f64>, labels: &[usize], mask: &[bool]) -> Result<f64> {
    if labels.len() != logits.nrows() || mask.len() != logits.nrows() {
        return Err(Error::shape("masked_cross_entropy", logits.nrows(), labels.len().min(mask.len())));
    }
    let m = masked_count(mask)?;
    let total: f64 = (0..logits.nrows())
        .filter(|&i| mask[i])
        .map(|i| -log_softmax_at(logits, i, labels[i]))
        .sum();
    Ok(total / m as f64)
}

/// Loss and `dL/dlogits` (nonzero only on masked rows).
pub(crate) fn cross_entropy_with_grad(
    logits: &DMatrix<f64>,
    labels: &[usize],
    mask: &[bool],
) -> Result<(f64, DMatrix<f64>)> {
    let loss = masked_cross_entropy(logits, labels, mask)?;
    let m = masked_count(mask)? as f64;
    let probs = softmax_rows(logits);
    let mut grad = DMatrix::zeros(logits.nrows(), logits.ncols());
    for i in (0..logits.nrows()).filter(|&i| mask[i]) {
        for c in 0..logits.ncols() {
            let target = if c == labels[i] { 1.0 } else { 0.0 };
            grad[(i, c)] = (probs[(i, c)] - target) / m;
        }
    }
    Ok((loss, grad))
}

/// Index of the largest logit per row; ties go to the lowest class index.
pub fn predictions(logits: &DMatrix<f64>) -> Vec<usize> {
    (0..logits.nrows())
        .map(|i| {
            let row = logits.row(i);
            let mut best = 0;
            for c in 1..row.len() {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Fraction of masked nodes whose prediction matches the label.
pub fn masked_accuracy(logits: &DMatrix<f64>, labels: &[usize], mask: &[bool]) -> Result<f64> {
    let m = masked_count(mask)?;
    let preds = predictions(logits);
    let hits = (0..preds.len()).filter(|&i| mask[i] && preds[i] == labels[i]).count();
    Ok(hits as f64 / m as f64)
}
