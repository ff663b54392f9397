//! Continuous risk-factor model.
//!
//! Assets are described by sensitivity densities over a one-dimensional
//! risk-factor space. Returns are simulated as quadratures of those densities
//! against a stochastic premium field, and the crate provides the analytic
//! moments of that model, energy distances between assets, a Mantel
//! permutation test linking the two, and the projection/clustering tools used
//! to inspect the result (metric MDS, PCA, Procrustes, silhouette).
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default). Every parallel stage writes to index-addressed slots and
//! draws randomness from index-addressed streams, so results are bit-identical
//! for any thread count and with the feature disabled.

pub mod distances;
pub mod error;
pub mod grid;
pub mod inference;
pub mod ingest;
pub mod kernel;
pub mod matrix;
pub mod numeric;
pub mod par;
pub mod projections;
pub mod rng;
pub mod simulator;
pub mod synthetic;

pub use error::{Error, Result};
pub use grid::{build_grid, mixture_profile, profile_l2, Grid, MixtureComponent, SensitivityProfile};
pub use kernel::{KernelSpec, KernelVariant};
pub use matrix::DistanceMatrix;
