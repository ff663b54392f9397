use super::ProjectionResult;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

const SYMMETRY_TOL: f64 = 1e-9;

/// Projects each asset onto the leading eigenvectors of a covariance matrix:
/// coordinate `j` of asset `i` is `v_j[i] · √max(λ_j, 0)`.
///
/// Eigenvectors are signed so that their largest-magnitude entry is
/// nonnegative (first such entry on ties).
pub fn pca_project(cov: &DMatrix<f64>, dim: usize) -> Result<ProjectionResult> {
    let n = cov.nrows();
    if cov.ncols() != n {
        return Err(Error::ShapeMismatch(format!("covariance is {}x{}", n, cov.ncols())));
    }
    if dim == 0 || dim > n {
        return Err(Error::SizeMismatch(format!("cannot take {dim} components of a {n}x{n} matrix")));
    }
    let asym = (cov - cov.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let (values, vectors) = sorted_eigen(cov);
    let coords = DMatrix::from_fn(n, dim, |i, j| vectors[(i, j)] * values[j].max(0.0).sqrt());
    Ok(ProjectionResult {
        coords,
        stress: 0.0,
        iterations: 0,
        explained_variance: values[..dim].to_vec(),
        stress_traces: Vec::new(),
    })
}

/// Eigenpairs in non-increasing eigenvalue order with the sign convention
/// applied; eigenvectors are the columns of the returned matrix.
pub(crate) fn sorted_eigen(cov: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = cov.nrows();
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let mut pivot = 0;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, j)] = sign * col[i];
        }
    }
    (values, vectors)
}
