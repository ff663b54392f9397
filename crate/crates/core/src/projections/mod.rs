//! Low-dimensional views of distance and covariance matrices, and cluster
//! quality in those views.

mod mds;
mod pca;
mod procrustes;
mod silhouette;

pub use mds::{metric_mds, raw_stress, smacof, squared_stress, MdsOptions, SmacofRun};
pub use pca::pca_project;
pub use procrustes::{procrustes_align, ProcrustesFit};
pub use silhouette::{silhouette, SilhouetteResult};

use nalgebra::DMatrix;
use serde::Serialize;

/// Coordinates from MDS or PCA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionResult {
    #[serde(skip)]
    pub coords: DMatrix<f64>,
    /// Raw stress of the returned configuration (MDS only).
    pub stress: f64,
    pub iterations: usize,
    /// Leading eigenvalues (PCA only).
    pub explained_variance: Vec<f64>,
    /// Squared-stress trace of every restart (MDS only).
    #[serde(skip)]
    pub stress_traces: Vec<Vec<f64>>,
}
