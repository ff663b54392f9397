//! Premium-field sampling, return simulation and the model's moments.
//!
//! Returns follow `R_{i,t} = Σ_k w_k β_i(ω_k) λ_t(ω_k) + ε_{i,t}`, the grid
//! quadrature of the sensitivity density against the premium field.

use crate::error::{Error, Result};
use crate::grid::{overlap, profile_l2, Grid, SensitivityProfile};
use crate::kernel::{KernelSpec, KernelVariant};
use crate::matrix::DistanceMatrix;
use crate::par;
use crate::rng::{substream, Purpose};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Default per-node expected premium.
pub const DEFAULT_PREMIUM_MEAN: f64 = 0.05;

/// Diagonal jitter added before factorizing a smooth kernel matrix.
pub const CHOLESKY_JITTER: f64 = 1e-10;

/// Sampled premium field: `horizon` rows of one value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct PremiumPath {
    grid: Grid,
    horizon: usize,
    values: Vec<f64>,
    mean_fn: Vec<f64>,
}

impl PremiumPath {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn mean_fn(&self) -> &[f64] {
        &self.mean_fn
    }

    /// Field values of period `t`.
    pub fn row(&self, t: usize) -> &[f64] {
        let m = self.grid.points();
        &self.values[t * m..(t + 1) * m]
    }

    /// Sample mean and (divisor `T - 1`) variance at every node.
    pub fn node_summary(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.grid.points();
        let t = self.horizon as f64;
        let mut mean = vec![0.0; m];
        for s in 0..self.horizon {
            for (acc, v) in mean.iter_mut().zip(self.row(s)) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|x| *x /= t);
        let mut var = vec![0.0; m];
        if self.horizon > 1 {
            for s in 0..self.horizon {
                for ((acc, v), mu) in var.iter_mut().zip(self.row(s)).zip(&mean) {
                    *acc += (v - mu) * (v - mu);
                }
            }
            var.iter_mut().for_each(|x| *x /= t - 1.0);
        }
        (mean, var)
    }
}

/// Draws `horizon` independent periods of the premium field.
pub fn sample_premium_paths(
    grid: Grid,
    kernel: &KernelSpec,
    mean_fn: &[f64],
    horizon: usize,
    seed: u64,
) -> Result<PremiumPath> {
    let m = grid.points();
    if mean_fn.len() != m {
        return Err(Error::SizeMismatch(format!(
            "mean function has {} values for {} grid points",
            mean_fn.len(),
            m
        )));
    }
    if horizon == 0 {
        return Err(Error::SizeMismatch("horizon must be at least 1".into()));
    }

    let mut values = vec![0.0; horizon * m];
    if kernel.sigma_sq == 0.0 {
        values.chunks_mut(m).for_each(|row| row.copy_from_slice(mean_fn));
        return Ok(PremiumPath {
            grid,
            horizon,
            values,
            mean_fn: mean_fn.to_vec(),
        });
    }

    match kernel.variant {
        KernelVariant::DiracDelta => {
            let scale: Vec<f64> = (0..m).map(|k| (kernel.sigma_sq / grid.weight(k)).sqrt()).collect();
            par::fill_chunks(&mut values, m, |t, row| {
                let mut rng = substream(seed, Purpose::Premium, t as u64);
                for k in 0..m {
                    let z: f64 = rng.sample(StandardNormal);
                    row[k] = mean_fn[k] + scale[k] * z;
                }
            });
        }
        KernelVariant::Constant => {
            let sigma = kernel.sigma_sq.sqrt();
            par::fill_chunks(&mut values, m, |t, row| {
                let mut rng = substream(seed, Purpose::Premium, t as u64);
                let z: f64 = rng.sample(StandardNormal);
                for k in 0..m {
                    row[k] = mean_fn[k] + sigma * z;
                }
            });
        }
        KernelVariant::SquaredExponential { .. } => {
            let mut cov = kernel.matrix(&grid);
            for k in 0..m {
                cov[(k, k)] += CHOLESKY_JITTER;
            }
            let chol = cov.cholesky().ok_or(Error::FactorizationFailure)?;
            let lower = chol.l();
            par::fill_chunks(&mut values, m, |t, row| {
                let mut rng = substream(seed, Purpose::Premium, t as u64);
                let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                for k in 0..m {
                    let mut acc = 0.0;
                    for l in 0..=k {
                        acc += lower[(k, l)] * z[l];
                    }
                    row[k] = mean_fn[k] + acc;
                }
            });
        }
    }
    Ok(PremiumPath {
        grid,
        horizon,
        values,
        mean_fn: mean_fn.to_vec(),
    })
}

/// `T × N` excess returns with asset labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    labels: Vec<String>,
    values: DMatrix<f64>,
    idio_sigma: Option<f64>,
    dates: Option<Vec<String>>,
}

impl ReturnsPanel {
    pub fn new(labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if labels.len() != values.ncols() {
            return Err(Error::ColumnMismatch(format!(
                "{} labels for {} return columns",
                labels.len(),
                values.ncols()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % values.nrows(), pos / values.nrows());
            return Err(Error::Parse {
                line: row + 1,
                message: format!("non-finite return for `{}`", labels[col]),
            });
        }
        Ok(Self {
            labels,
            values,
            idio_sigma: None,
            dates: None,
        })
    }

    pub fn with_dates(mut self, dates: Vec<String>) -> Result<Self> {
        if dates.len() != self.values.nrows() {
            return Err(Error::SizeMismatch(format!(
                "{} dates for {} periods",
                dates.len(),
                self.values.nrows()
            )));
        }
        self.dates = Some(dates);
        Ok(self)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn periods(&self) -> usize {
        self.values.nrows()
    }

    pub fn assets(&self) -> usize {
        self.values.ncols()
    }

    pub fn idio_sigma(&self) -> Option<f64> {
        self.idio_sigma
    }

    pub fn dates(&self) -> Option<&[String]> {
        self.dates.as_deref()
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, labels: &[String]) -> Result<ReturnsPanel> {
        let idx = labels
            .iter()
            .map(|l| {
                self.labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| Error::LabelMismatch(format!("label `{l}` not in returns")))
            })
            .collect::<Result<Vec<_>>>()?;
        let values = DMatrix::from_fn(self.periods(), idx.len(), |t, j| self.values[(t, idx[j])]);
        Ok(ReturnsPanel {
            labels: labels.to_vec(),
            values,
            idio_sigma: self.idio_sigma,
            dates: self.dates.clone(),
        })
    }
}

/// Integrates each profile against every period of the premium field and
/// adds Gaussian idiosyncratic noise.
pub fn simulate_returns(
    labels: &[String],
    profiles: &[SensitivityProfile],
    paths: &PremiumPath,
    idio_sigma: f64,
    seed: u64,
) -> Result<ReturnsPanel> {
    if labels.len() != profiles.len() {
        return Err(Error::SizeMismatch(format!(
            "{} labels for {} profiles",
            labels.len(),
            profiles.len()
        )));
    }
    if !(idio_sigma >= 0.0 && idio_sigma.is_finite()) {
        return Err(Error::NonPositiveParameter {
            name: "idio_sigma",
            value: idio_sigma,
        });
    }
    if profiles.iter().any(|p| p.grid() != paths.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = paths.grid;
    let n = profiles.len();
    let weighted: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| p.density().iter().enumerate().map(|(k, b)| b * grid.weight(k)).collect())
        .collect();

    let horizon = paths.horizon;
    let mut rows = vec![0.0; horizon * n];
    if n > 0 {
        par::fill_chunks(&mut rows, n, |t, out| {
            let field = paths.row(t);
            for (slot, wb) in out.iter_mut().zip(&weighted) {
                *slot = wb.iter().zip(field).map(|(a, b)| a * b).sum();
            }
            if idio_sigma > 0.0 {
                let mut rng = substream(seed, Purpose::Idiosyncratic, t as u64);
                for slot in out.iter_mut() {
                    let e: f64 = rng.sample(StandardNormal);
                    *slot += idio_sigma * e;
                }
            }
        });
    }
    let mut panel = ReturnsPanel::new(labels.to_vec(), DMatrix::from_row_slice(horizon, n, &rows))?;
    panel.idio_sigma = Some(idio_sigma);
    Ok(panel)
}

/// Model covariance of the factor components of two assets' returns.
/// Idiosyncratic variance is not included.
pub fn analytic_covariance(p_i: &SensitivityProfile, p_j: &SensitivityProfile, kernel: &KernelSpec) -> Result<f64> {
    p_i.same_grid(p_j)?;
    Ok(kernel.quadratic_form(p_i.grid(), p_i.density(), p_j.density()))
}

/// Analytic covariance matrix of a set of profiles.
pub fn analytic_covariance_matrix(profiles: &[SensitivityProfile], kernel: &KernelSpec) -> Result<DMatrix<f64>> {
    let n = profiles.len();
    let mut cov = DMatrix::zeros(n, n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values = par::map_indexed(pairs.len(), |p| {
        let (i, j) = pairs[p];
        analytic_covariance(&profiles[i], &profiles[j], kernel)
    });
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        cov[(i, j)] = v;
        cov[(j, i)] = v;
    }
    Ok(cov)
}

/// Return correlation under the delta kernel: the normalized overlap of the
/// two densities.
pub fn analytic_correlation(p_i: &SensitivityProfile, p_j: &SensitivityProfile) -> Result<f64> {
    let c = overlap(p_i, p_j)?;
    let a = profile_l2(p_i);
    let b = profile_l2(p_j);
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    Ok(c / (a * b).sqrt())
}

/// Sample statistics of a returns panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub labels: Vec<String>,
    pub means: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub corr: DMatrix<f64>,
    pub variances: Vec<f64>,
}

/// Column means and unbiased (divisor `T - 1`) covariance.
pub fn sample_covariance(panel: &ReturnsPanel) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let t = panel.periods();
    if t < 2 {
        return Err(Error::SizeMismatch(format!("need at least 2 periods, got {t}")));
    }
    let n = panel.assets();
    let v = panel.values();
    let means: Vec<f64> = (0..n).map(|j| v.column(j).sum() / t as f64).collect();
    let centered = DMatrix::from_fn(t, n, |r, j| v[(r, j)] - means[j]);
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s = centered.column(i).dot(&centered.column(j)) / (t - 1) as f64;
            cov[(i, j)] = s;
            cov[(j, i)] = s;
        }
    }
    Ok((means, cov))
}

/// Means, covariance, Pearson correlation and variances of each asset.
pub fn empirical_moments(panel: &ReturnsPanel) -> Result<Moments> {
    let (means, cov) = sample_covariance(panel)?;
    let n = panel.assets();
    let variances: Vec<f64> = (0..n).map(|i| cov[(i, i)]).collect();
    if let Some(i) = variances.iter().position(|&v| v <= 0.0) {
        return Err(Error::DegenerateColumn(panel.labels()[i].clone()));
    }
    let sd: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    let corr = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { cov[(i, j)] / (sd[i] * sd[j]) });
    Ok(Moments {
        labels: panel.labels().to_vec(),
        means,
        cov,
        corr,
        variances,
    })
}

/// `d_ij = σ_i² + σ_j² − 2 ρ_ij σ_i σ_j`, the variance of `R_i − R_j`.
pub fn return_distance_matrix(moments: &Moments) -> Result<DistanceMatrix> {
    let sd: Vec<f64> = moments.variances.iter().map(|v| v.sqrt()).collect();
    DistanceMatrix::from_pairs(moments.labels.clone(), |i, j| {
        let d = moments.variances[i] + moments.variances[j] - 2.0 * moments.corr[(i, j)] * sd[i] * sd[j];
        d.max(0.0)
    })
}

/// Analytic covariance of `R_i` including idiosyncratic variance on the
/// diagonal, with the large-sample standard error of each sample covariance
/// entry for Gaussian returns: `sqrt((C_ii C_jj + C_ij²) / (T − 1))`.
pub fn covariance_standard_errors(analytic: &DMatrix<f64>, idio_sigma: f64, periods: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = analytic.nrows();
    let total = DMatrix::from_fn(n, n, |i, j| {
        analytic[(i, j)] + if i == j { idio_sigma * idio_sigma } else { 0.0 }
    });
    let se = DMatrix::from_fn(n, n, |i, j| {
        ((total[(i, i)] * total[(j, j)] + total[(i, j)] * total[(i, j)]) / (periods as f64 - 1.0)).sqrt()
    });
    (total, se)
}

/// Expected excess return `Σ_k w_k β_k m_k`.
pub fn expected_return(profile: &SensitivityProfile, mean_fn: &[f64]) -> f64 {
    let g = profile.grid();
    profile
        .density()
        .iter()
        .zip(mean_fn)
        .enumerate()
        .map(|(k, (b, m))| g.weight(k) * b * m)
        .sum()
}

/// Column view helper used by tests and the CLI.
pub fn column(panel: &ReturnsPanel, j: usize) -> DVector<f64> {
    panel.values().column(j).into_owned()
}
