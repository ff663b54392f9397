use crate::error::{Error, Result};
use nalgebra::{DMatrix, RowDVector};

/// Similarity transform `x ↦ s·x·Q + t` fitted to a reference configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcrustesFit {
    pub aligned: DMatrix<f64>,
    pub rotation: DMatrix<f64>,
    pub scale: f64,
    pub translation: RowDVector<f64>,
    /// Frobenius distance between the aligned configuration and the reference.
    pub residual: f64,
}

/// Orthogonal Procrustes with scaling and translation: minimizes
/// `‖s·x·Q + 1tᵀ − ref‖_F` over orthogonal `Q`, `s > 0` and `t`.
pub fn procrustes_align(x: &DMatrix<f64>, reference: &DMatrix<f64>) -> Result<ProcrustesFit> {
    if x.shape() != reference.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} cannot be aligned to {:?}",
            x.shape(),
            reference.shape()
        )));
    }
    let (n, k) = x.shape();
    if n == 0 || k == 0 {
        return Err(Error::ShapeMismatch("empty configuration".into()));
    }
    let mean_x = x.row_mean();
    let mean_ref = reference.row_mean();
    let xc = DMatrix::from_fn(n, k, |i, j| x[(i, j)] - mean_x[j]);
    let rc = DMatrix::from_fn(n, k, |i, j| reference[(i, j)] - mean_ref[j]);

    let norm_sq = xc.norm_squared();
    let (rotation, scale) = if norm_sq == 0.0 {
        (DMatrix::identity(k, k), 1.0)
    } else {
        let svd = (xc.transpose() * &rc).svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let scale = svd.singular_values.sum() / norm_sq;
        (u * v_t, if scale > 0.0 { scale } else { 1.0 })
    };
    let translation = mean_ref - (mean_x * &rotation) * scale;
    let mut aligned = (x * &rotation) * scale;
    for mut row in aligned.row_iter_mut() {
        row += &translation;
    }
    let residual = (&aligned - reference).norm();
    Ok(ProcrustesFit {
        aligned,
        rotation,
        scale,
        translation,
        residual,
    })
}
