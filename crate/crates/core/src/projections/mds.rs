use super::pca::sorted_eigen;
use super::ProjectionResult;
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::par;
use crate::rng::{substream, Purpose};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdsOptions {
    pub dim: usize,
    pub max_iter: usize,
    /// Stop once the relative decrease of squared stress falls below this.
    pub tol: f64,
    pub seed: u64,
    /// Random starts tried besides the classical-scaling start; the lowest final stress wins.
    pub restarts: usize,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self {
            dim: 2,
            max_iter: 500,
            tol: 1e-9,
            seed: 0,
            restarts: 5,
        }
    }
}

/// One SMACOF descent from a fixed start.
#[derive(Debug, Clone, PartialEq)]
pub struct SmacofRun {
    pub coords: DMatrix<f64>,
    /// Squared stress before the first update and after each accepted one.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// `Σ_{i<j} (d_ij − ‖z_i − z_j‖)²`.
pub fn squared_stress(d: &DistanceMatrix, coords: &DMatrix<f64>) -> f64 {
    let n = d.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = d.get(i, j) - (coords.row(i) - coords.row(j)).norm();
            s += r * r;
        }
    }
    s
}

/// Raw Kruskal stress `√(Σ_{i≠j} (d_ij − ‖z_i − z_j‖)²)`.
pub fn raw_stress(d: &DistanceMatrix, coords: &DMatrix<f64>) -> f64 {
    (2.0 * squared_stress(d, coords)).sqrt()
}

// Guttman transform with unit weights: X⁺ = B(X) X / n.
fn guttman(d: &DistanceMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.len();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = (x.row(i) - x.row(j)).norm();
            if dist > 0.0 {
                let v = -d.get(i, j) / dist;
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
    }
    for i in 0..n {
        let s: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)]).sum();
        b[(i, i)] = -s;
    }
    (b * x) / n as f64
}

/// Runs SMACOF from `init` until the relative squared-stress decrease drops
/// below `tol` or `max_iter` updates have been made.
pub fn smacof(d: &DistanceMatrix, init: DMatrix<f64>, max_iter: usize, tol: f64) -> Result<SmacofRun> {
    if init.nrows() != d.len() {
        return Err(Error::SizeMismatch(format!(
            "{} starting points for {} assets",
            init.nrows(),
            d.len()
        )));
    }
    let mut x = init;
    let mut current = squared_stress(d, &x);
    let mut trace = vec![current];
    let mut iterations = 0;
    while iterations < max_iter && current > 0.0 {
        let next_x = guttman(d, &x);
        let next = squared_stress(d, &next_x);
        iterations += 1;
        if next > current {
            // rounding noise at the optimum; keep the better configuration
            break;
        }
        trace.push(next);
        x = next_x;
        let decrease = (current - next) / current;
        current = next;
        if decrease < tol {
            break;
        }
    }
    Ok(SmacofRun {
        coords: x,
        trace,
        iterations,
    })
}

fn random_start(d: &DistanceMatrix, dim: usize, seed: u64, restart: usize) -> DMatrix<f64> {
    let n = d.len();
    let pairs = (n * n.saturating_sub(1) / 2).max(1) as f64;
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += d.get(i, j);
        }
    }
    let scale = (total / pairs).max(f64::MIN_POSITIVE);
    let mut rng = substream(seed, Purpose::MdsInit, restart as u64);
    DMatrix::from_fn(n, dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

// Torgerson scaling: top eigenvectors of the double-centred −D²/2.
fn classical_start(d: &DistanceMatrix, dim: usize) -> DMatrix<f64> {
    let n = d.len();
    let sq = d.entries().map(|v| -0.5 * v * v);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| sq[(i, j)] - row_means[i] - row_means[j] + grand);
    let (values, vectors) = sorted_eigen(&b);
    DMatrix::from_fn(n, dim, |i, k| {
        if k < n {
            vectors[(i, k)] * values[k].max(0.0).sqrt()
        } else {
            0.0
        }
    })
}

/// Metric MDS by stress majorization, started once from classical scaling
/// and `restarts` times from seeded random configurations.
pub fn metric_mds(d: &DistanceMatrix, options: &MdsOptions) -> Result<ProjectionResult> {
    if options.dim == 0 {
        return Err(Error::SizeMismatch("embedding dimension must be at least 1".into()));
    }
    if options.max_iter == 0 {
        return Err(Error::SizeMismatch("max_iter must be at least 1".into()));
    }
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "tol",
            value: options.tol,
        });
    }
    let runs = par::map_indexed(options.restarts + 1, |r| {
        let init = match r {
            0 => classical_start(d, options.dim),
            _ => random_start(d, options.dim, options.seed, r - 1),
        };
        smacof(d, init, options.max_iter, options.tol)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // lowest stress, earliest start on ties
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.trace.last() < runs[best].trace.last() {
            best = r;
        }
    }
    let coords = runs[best].coords.clone();
    Ok(ProjectionResult {
        stress: raw_stress(d, &coords),
        iterations: runs[best].iterations,
        coords,
        explained_variance: Vec::new(),
        stress_traces: runs.into_iter().map(|r| r.trace).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::euclidean_distances;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn zero_matrix_collapses() {
        let d = DistanceMatrix::new(labels(5), DMatrix::zeros(5, 5)).unwrap();
        let r = metric_mds(&d, &MdsOptions::default()).unwrap();
        assert_eq!(r.stress, 0.0);
        for i in 1..5 {
            assert!((r.coords.row(i) - r.coords.row(0)).norm() < 1e-12);
        }
    }

    #[test]
    fn two_points_at_unit_separation() {
        let d = DistanceMatrix::from_pairs(labels(2), |_, _| 1.0).unwrap();
        let r = metric_mds(&d, &MdsOptions::default()).unwrap();
        assert!(r.stress < 1e-9);
        assert!(((r.coords.row(0) - r.coords.row(1)).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stress_invariant_under_rigid_motion() {
        let pts = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.2, 0.3, 2.0, -1.0, 0.5]);
        let d = DistanceMatrix::from_pairs(labels(4), |i, j| 1.0 + (i * j) as f64 * 0.3).unwrap();
        let (c, s) = (0.6f64, 0.8f64);
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let moved = (&pts * rot).map(|v| v + 3.0);
        assert!((raw_stress(&d, &pts) - raw_stress(&d, &moved)).abs() < 1e-12);
    }

    #[test]
    fn recovers_planted_configuration() {
        let pts = DMatrix::from_fn(10, 2, |i, k| ((i * 7 + k * 3) as f64 * 0.913).sin() * 2.0);
        let d = euclidean_distances(labels(10), &pts).unwrap();
        let r = metric_mds(&d, &MdsOptions::default()).unwrap();
        assert!(r.stress < 1e-6, "stress {}", r.stress);
        for i in 0..10 {
            for j in 0..10 {
                let e = (r.coords.row(i) - r.coords.row(j)).norm();
                assert!((e - d.get(i, j)).abs() < 1e-4);
            }
        }
        for trace in &r.stress_traces {
            assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn rejects_bad_options() {
        let d = DistanceMatrix::from_pairs(labels(3), |_, _| 1.0).unwrap();
        assert!(metric_mds(&d, &MdsOptions { dim: 0, ..Default::default() }).is_err());
        assert!(metric_mds(&d, &MdsOptions { tol: 0.0, ..Default::default() }).is_err());
        assert!(smacof(&d, DMatrix::zeros(2, 2), 10, 1e-9).is_err());
    }
}
