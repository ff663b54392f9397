//! Covariance models for the premium field.

use crate::error::{Error, Result};
use crate::grid::Grid;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelVariant {
    /// Premiums at distinct factors are uncorrelated.
    DiracDelta,
    /// One shared shock across the whole factor space.
    Constant,
    SquaredExponential { length_scale: f64 },
}

/// Premium covariance `Cov(λ(ω), λ(ω')) = σ² f(ω, ω')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub variant: KernelVariant,
    pub sigma_sq: f64,
}

impl KernelSpec {
    pub fn dirac(sigma_sq: f64) -> Result<Self> {
        Self::new(KernelVariant::DiracDelta, sigma_sq)
    }

    pub fn constant(sigma_sq: f64) -> Result<Self> {
        Self::new(KernelVariant::Constant, sigma_sq)
    }

    pub fn squared_exponential(sigma_sq: f64, length_scale: f64) -> Result<Self> {
        Self::new(KernelVariant::SquaredExponential { length_scale }, sigma_sq)
    }

    pub fn new(variant: KernelVariant, sigma_sq: f64) -> Result<Self> {
        // zero variance is allowed and means a deterministic field
        if !(sigma_sq >= 0.0 && sigma_sq.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: "sigma_sq",
                value: sigma_sq,
            });
        }
        if let KernelVariant::SquaredExponential { length_scale } = variant {
            if !(length_scale > 0.0 && length_scale.is_finite()) {
                return Err(Error::NonPositiveParameter {
                    name: "length_scale",
                    value: length_scale,
                });
            }
        }
        Ok(Self { variant, sigma_sq })
    }

    /// Kernel matrix on the grid nodes.
    ///
    /// The discrete delta puts `σ²/w_k` on the diagonal so that the quadrature
    /// `Σ_k w_k β_k λ_k` has variance `σ² Σ_k w_k β_k²`.
    pub fn matrix(&self, grid: &Grid) -> DMatrix<f64> {
        let m = grid.points();
        match self.variant {
            KernelVariant::DiracDelta => {
                DMatrix::from_fn(m, m, |k, l| if k == l { self.sigma_sq / grid.weight(k) } else { 0.0 })
            }
            KernelVariant::Constant => DMatrix::from_element(m, m, self.sigma_sq),
            KernelVariant::SquaredExponential { length_scale } => {
                let nodes = grid.nodes();
                let denom = 2.0 * length_scale * length_scale;
                DMatrix::from_fn(m, m, |k, l| {
                    let d = nodes[k] - nodes[l];
                    self.sigma_sq * (-(d * d) / denom).exp()
                })
            }
        }
    }

    /// `Σ_k Σ_l w_k a_k K_kl b_l w_l` for raw node values `a`, `b`.
    pub fn quadratic_form(&self, grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), grid.points());
        debug_assert_eq!(b.len(), grid.points());
        match self.variant {
            KernelVariant::DiracDelta => {
                let s: f64 = a
                    .iter()
                    .zip(b)
                    .enumerate()
                    .map(|(k, (x, y))| grid.weight(k) * x * y)
                    .sum();
                self.sigma_sq * s
            }
            KernelVariant::Constant => self.sigma_sq * grid.integrate(a) * grid.integrate(b),
            KernelVariant::SquaredExponential { length_scale } => {
                let nodes = grid.nodes();
                let denom = 2.0 * length_scale * length_scale;
                let mut total = 0.0;
                for k in 0..a.len() {
                    let wa = grid.weight(k) * a[k];
                    if wa == 0.0 {
                        continue;
                    }
                    let inner: f64 = (0..b.len())
                        .map(|l| {
                            let d = nodes[k] - nodes[l];
                            (-(d * d) / denom).exp() * b[l] * grid.weight(l)
                        })
                        .sum();
                    total += wa * inner;
                }
                self.sigma_sq * total
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::dirac(-1.0).is_err());
        assert!(KernelSpec::squared_exponential(1.0, 0.0).is_err());
        assert!(KernelSpec::constant(0.0).is_ok());
    }

    #[test]
    fn kernel_matrices_are_symmetric_psd() {
        let grid = build_grid(0.0, 1.0, 41).unwrap();
        for kernel in [
            KernelSpec::dirac(0.04).unwrap(),
            KernelSpec::constant(0.04).unwrap(),
            KernelSpec::squared_exponential(0.04, 0.1).unwrap(),
        ] {
            let k = kernel.matrix(&grid);
            assert_eq!(k, k.transpose());
            let eig = k.clone().symmetric_eigen();
            let max = eig.eigenvalues.amax();
            assert!(eig.eigenvalues.iter().all(|&e| e >= -1e-10 * max), "{kernel:?}");
        }
    }

    #[test]
    fn quadratic_form_matches_matrix_product() {
        let grid = build_grid(0.0, 1.0, 21).unwrap();
        let a: Vec<f64> = (0..21).map(|k| 1.0 + (k as f64).sin()).collect();
        let b: Vec<f64> = (0..21).map(|k| 2.0 + (k as f64 * 0.3).cos()).collect();
        let w = nalgebra::DVector::from_vec(grid.weights());
        let av = nalgebra::DVector::from_vec(a.clone()).component_mul(&w);
        let bv = nalgebra::DVector::from_vec(b.clone()).component_mul(&w);
        for kernel in [
            KernelSpec::dirac(0.5).unwrap(),
            KernelSpec::constant(0.5).unwrap(),
            KernelSpec::squared_exponential(0.5, 0.2).unwrap(),
        ] {
            let direct = (av.transpose() * kernel.matrix(&grid) * &bv)[(0, 0)];
            let q = kernel.quadratic_form(&grid, &a, &b);
            assert!((q - direct).abs() < 1e-12 * direct.abs().max(1.0), "{kernel:?}");
        }
    }
}
