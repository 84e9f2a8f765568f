use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::randomized::{randomized_svd, RndSvdConfig};
use super::svd::{full_svd, singular_spectrum};
use crate::error::{Error, Result};

/// Spectrum window and offset of the graph-subspace-energy regularizer.
///
/// The window covers singular values `k1+1 ..= k2` (1-based) with
/// `k1 = floor(beta1 * n)` and `k2 = floor(beta2 * n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GseParams {
    pub beta1: f64,
    pub beta2: f64,
    /// Offset added to every singular value inside the window.
    pub alpha: f64,
    /// Weight of the energy term in the training objective. The executed
    /// update only sees it through `alpha`.
    pub gamma: f64,
}

impl Default for GseParams {
    fn default() -> Self {
        Self {
            beta1: 0.1,
            beta2: 0.5,
            alpha: 0.0,
            gamma: 1.0,
        }
    }
}

impl GseParams {
    pub fn validate(&self) -> Result<()> {
        check_betas(self.beta1, self.beta2)?;
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha = {} must be finite and >= 0", self.alpha)));
        }
        Ok(())
    }

    /// `(k1, k2)` for an `n`-node graph.
    pub fn window(&self, n: usize) -> (usize, usize) {
        window(n, self.beta1, self.beta2)
    }
}

fn check_betas(beta1: f64, beta2: f64) -> Result<()> {
    if !(0.0 <= beta1 && beta1 < beta2 && beta2 <= 1.0) {
        return Err(Error::Parameter(format!(
            "need 0 <= beta1 < beta2 <= 1, got beta1 = {beta1}, beta2 = {beta2}"
        )));
    }
    Ok(())
}

pub fn window(n: usize, beta1: f64, beta2: f64) -> (usize, usize) {
    let k1 = ((beta1 * n as f64).floor() as usize).min(n);
    let k2 = ((beta2 * n as f64).floor() as usize).min(n);
    (k1, k2)
}

/// Window sum over an already computed descending spectrum of an `n`-node matrix.
pub fn gse_of_spectrum(sigma: &[f64], beta1: f64, beta2: f64) -> Result<f64> {
    check_betas(beta1, beta2)?;
    let (k1, k2) = window(sigma.len(), beta1, beta2);
    Ok(sigma[k1..k2].iter().sum())
}

/// Graph subspace energy: the sum of the singular values with 1-based index
/// in `floor(beta1 n) + 1 ..= floor(beta2 n)`.
pub fn gse(a: &DMatrix<f64>, beta1: f64, beta2: f64) -> Result<f64> {
    check_betas(beta1, beta2)?;
    gse_of_spectrum(&singular_spectrum(a)?, beta1, beta2)
}

/// `gse(perturbed) / gse(clean)`.
pub fn normalized_gse(clean: &DMatrix<f64>, perturbed: &DMatrix<f64>, beta1: f64, beta2: f64) -> Result<f64> {
    if clean.shape() != perturbed.shape() {
        return Err(Error::shape(
            "normalized_gse",
            format!("{:?}", clean.shape()),
            format!("{:?}", perturbed.shape()),
        ));
    }
    let base = gse(clean, beta1, beta2)?;
    if base <= 0.0 {
        return Err(Error::Domain("clean graph has zero subspace energy".into()));
    }
    Ok(gse(perturbed, beta1, beta2)? / base)
}

/// Reference upper bound `sqrt(delta / n)` for the offset, from
/// `n * alpha^2 <= delta`.
pub fn alpha_budget(delta: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("alpha_budget needs n >= 1".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::Parameter(format!("budget {delta} must be >= 0")));
    }
    Ok((delta / n as f64).sqrt())
}

/// How singular triplets are obtained for the proximal step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SvdBackend {
    Exact,
    Randomized(RndSvdConfig),
}

/// The singular values the proximal step should produce: top `k1` kept,
/// `k1+1 ..= k2` shifted by `alpha`, the rest dropped.
pub fn offset_spectrum(sigma: &[f64], k1: usize, k2: usize, alpha: f64) -> Vec<f64> {
    sigma
        .iter()
        .take(k2)
        .enumerate()
        .map(|(i, &s)| if i < k1 { s } else { s + alpha })
        .collect()
}

/// Proximal step of the offset energy term:
/// `U_k2 diag(s_1, .., s_k1, s_(k1+1) + alpha, .., s_k2 + alpha) V_k2^T`,
/// symmetrized.
pub fn gse_offset_prox(a: &DMatrix<f64>, params: &GseParams, backend: &SvdBackend) -> Result<DMatrix<f64>> {
    params.validate()?;
    let n = a.nrows();
    let (k1, k2) = params.window(n);
    if k2 == 0 {
        return Err(Error::Parameter(format!(
            "window upper index floor({} * {n}) is zero",
            params.beta2
        )));
    }
    let factors = match backend {
        SvdBackend::Exact => full_svd(a)?,
        SvdBackend::Randomized(cfg) => {
            if cfg.k < k2 {
                return Err(Error::Parameter(format!(
                    "randomized rank k = {} below window end k2 = {k2}",
                    cfg.k
                )));
            }
            randomized_svd(a, cfg)?
        }
    };
    let shifted = offset_spectrum(factors.sigma.as_slice(), k1, k2, params.alpha);
    let out = factors.reconstruct_with(&shifted);
    Ok((&out + out.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_energy_is_n() {
        let a = DMatrix::<f64>::identity(6, 6);
        assert!((gse(&a, 0.0, 1.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_unit_energy() {
        let u = nalgebra::DVector::from_vec(vec![0.6, 0.8, 0.0]);
        let a = &u * u.transpose();
        assert!((gse(&a, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_cycle_half_window() {
        let mut a = DMatrix::zeros(4, 4);
        for i in 0..4 {
            a[(i, (i + 1) % 4)] = 1.0;
            a[((i + 1) % 4, i)] = 1.0;
        }
        assert!((gse(&a, 0.0, 0.5).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_betas() {
        let a = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(gse(&a, 0.5, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(gse(&a, -0.1, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(gse(&a, 0.1, 1.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn normalized_identity_and_zero() {
        let a = DMatrix::<f64>::identity(3, 3);
        assert_eq!(normalized_gse(&a, &a, 0.0, 1.0).unwrap(), 1.0);
        assert!(matches!(
            normalized_gse(&DMatrix::zeros(3, 3), &a, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn alpha_budget_values() {
        assert_eq!(alpha_budget(0.0, 10).unwrap(), 0.0);
        assert_eq!(alpha_budget(10.0, 10).unwrap(), 1.0);
        assert_eq!(alpha_budget(100.0, 400).unwrap(), 0.5);
        assert!(alpha_budget(1.0, 0).is_err());
    }

    #[test]
    fn diagonal_prox() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        // n = 3: beta1 = 1/3 -> k1 = 1, beta2 = 2/3 -> k2 = 2
        let params = GseParams {
            beta1: 0.34,
            beta2: 0.67,
            alpha: 0.5,
            gamma: 1.0,
        };
        assert_eq!(params.window(3), (1, 2));
        let out = gse_offset_prox(&a, &params, &SvdBackend::Exact).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.5, 0.0]));
        assert!((out - expected).amax() < 1e-12);
    }

    #[test]
    fn zero_window_end_rejected() {
        let a = DMatrix::<f64>::identity(3, 3);
        let params = GseParams {
            beta1: 0.0,
            beta2: 0.2,
            alpha: 0.0,
            gamma: 1.0,
        };
        assert!(matches!(
            gse_offset_prox(&a, &params, &SvdBackend::Exact),
            Err(Error::Parameter(_))
        ));
    }
}
