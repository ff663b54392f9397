//! Distances between assets.
//!
//! The energy distance between two profiles is `2 ∫ (F_i − F_j)² dω` over
//! their CDFs. [`energy_distance_samples`] computes the same quantity from
//! draws, `2E|X−Y| − E|X−X'| − E|Y−Y'|`, and serves as an independent check
//! through inverse-CDF sampling of the profiles.

use crate::error::{Error, Result};
use crate::grid::{overlap, profile_l2, SensitivityProfile};
use crate::matrix::DistanceMatrix;
use crate::par;
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

/// Tolerance used when flagging the correlation bound as satisfied.
pub const BOUND_TOL: f64 = 1e-12;

/// Cumulative distribution at the grid nodes (cumulative trapezoid), so
/// `F_0 = 0` and `F_{M−1} = 1`.
pub fn profile_cdf(p: &SensitivityProfile) -> Vec<f64> {
    let d = p.density();
    let h = p.grid().spacing();
    let mut cdf = Vec::with_capacity(d.len());
    let mut acc = 0.0;
    cdf.push(0.0);
    for k in 1..d.len() {
        acc += 0.5 * h * (d[k - 1] + d[k]);
        cdf.push(acc);
    }
    cdf
}

/// Squared energy distance `D²` between two profiles on the same grid.
pub fn energy_distance_density(p_i: &SensitivityProfile, p_j: &SensitivityProfile) -> Result<f64> {
    p_i.same_grid(p_j)?;
    let fi = profile_cdf(p_i);
    let fj = profile_cdf(p_j);
    let sq: Vec<f64> = fi.iter().zip(&fj).map(|(a, b)| (a - b) * (a - b)).collect();
    Ok(2.0 * p_i.grid().integrate(&sq))
}

// Σ over all ordered pairs of |a_i − a_j| for sorted input.
fn sorted_pair_sum(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let half: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, x)| x * (2.0 * k as f64 - n + 1.0))
        .sum();
    2.0 * half
}

// Σ_i Σ_j |x_i − y_j| for sorted inputs, by a merge with running prefix sums.
fn sorted_cross_sum(xs: &[f64], ys: &[f64]) -> f64 {
    let total_y: f64 = ys.iter().sum();
    let mut below_count = 0usize;
    let mut below_sum = 0.0;
    let mut acc = 0.0;
    for &x in xs {
        while below_count < ys.len() && ys[below_count] <= x {
            below_sum += ys[below_count];
            below_count += 1;
        }
        let above_count = ys.len() - below_count;
        let above_sum = total_y - below_sum;
        acc += x * below_count as f64 - below_sum + above_sum - x * above_count as f64;
    }
    acc
}

/// Energy statistic `2E|X−Y| − E|X−X'| − E|Y−Y'|` over all ordered pairs
/// (the V-statistic, equal to `2∫(F̂_x − F̂_y)²` of the empirical CDFs).
pub fn energy_distance_samples(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut x = xs.to_vec();
    let mut y = ys.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let m = y.len() as f64;
    let cross = sorted_cross_sum(&x, &y) / (n * m);
    let within_x = sorted_pair_sum(&x) / (n * n);
    let within_y = sorted_pair_sum(&y) / (m * m);
    Ok(2.0 * cross - within_x - within_y)
}

// Inverse of the piecewise-linear CDF through the nodes.
fn quantile(cdf: &[f64], grid: &crate::grid::Grid, u: f64) -> f64 {
    let last = cdf.len() - 1;
    let u = u * cdf[last];
    let k = cdf.partition_point(|&f| f < u).clamp(1, last);
    let (lo, hi) = (cdf[k - 1], cdf[k]);
    let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.0 };
    grid.node(k - 1) + frac * grid.spacing()
}

/// Draws `n` values from a profile by inverting its piecewise-linear CDF.
pub fn sample_profile<R: Rng + ?Sized>(p: &SensitivityProfile, n: usize, rng: &mut R) -> Vec<f64> {
    let cdf = profile_cdf(p);
    (0..n).map(|_| quantile(&cdf, p.grid(), rng.random::<f64>())).collect()
}

/// Like [`sample_profile`], but with one uniform drawn inside each of the
/// `n` equal-probability strata `[i/n, (i+1)/n)`, so the empirical CDF stays
/// within `1/n` of the profile's CDF.
pub fn sample_profile_stratified<R: Rng + ?Sized>(p: &SensitivityProfile, n: usize, rng: &mut R) -> Vec<f64> {
    let cdf = profile_cdf(p);
    (0..n)
        .map(|i| quantile(&cdf, p.grid(), (i as f64 + rng.random::<f64>()) / n as f64))
        .collect()
}

/// `arccos(cos θ) / π` with the cosine clamped to `[−1, 1]`.
pub fn angular_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| (a / nu) * (b / nv)).sum();
    Ok(dot.clamp(-1.0, 1.0).acos() / std::f64::consts::PI)
}

/// Right-hand side of the energy/correlation inequality,
/// `2(a + b − 2ρ√(ab))`.
pub fn bound_rhs(a: f64, b: f64, rho: f64) -> f64 {
    2.0 * (a + b - 2.0 * rho * (a * b).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundPair {
    pub i: usize,
    pub j: usize,
    pub d_sq: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Per-pair check of `D² ≥ 2(A + B − 2ρ√(AB))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub pairs: Vec<BoundPair>,
    pub violation_rate: f64,
}

impl BoundReport {
    pub fn violations(&self) -> usize {
        self.pairs.iter().filter(|p| !p.satisfied).count()
    }
}

/// Evaluates the bound for every pair using `corr` (analytic or empirical).
pub fn bound_report(profiles: &[SensitivityProfile], corr: &DMatrix<f64>) -> Result<BoundReport> {
    let n = profiles.len();
    if corr.nrows() != n || corr.ncols() != n {
        return Err(Error::SizeMismatch(format!(
            "{n} profiles for a {}x{} correlation matrix",
            corr.nrows(),
            corr.ncols()
        )));
    }
    let l2: Vec<f64> = profiles.iter().map(profile_l2).collect();
    let idx = par::upper_pairs(n);
    let results = par::map_indexed(idx.len(), |p| {
        let (i, j) = idx[p];
        let d_sq = energy_distance_density(&profiles[i], &profiles[j])?;
        let rhs = bound_rhs(l2[i], l2[j], corr[(i, j)]);
        Ok(BoundPair {
            i,
            j,
            d_sq,
            rhs,
            satisfied: d_sq >= rhs - BOUND_TOL,
        })
    });
    let pairs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let violation_rate = if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().filter(|p| !p.satisfied).count() as f64 / pairs.len() as f64
    };
    Ok(BoundReport { pairs, violation_rate })
}

/// `Σ w_k p_k log(p_k / q_k)`; `+∞` when `p` has mass where `q` has none.
pub fn kl_divergence(p_i: &SensitivityProfile, p_j: &SensitivityProfile) -> Result<f64> {
    p_i.same_grid(p_j)?;
    let g = p_i.grid();
    let mut acc = 0.0;
    for (k, (&p, &q)) in p_i.density().iter().zip(p_j.density()).enumerate() {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += g.weight(k) * p * (p / q).ln();
    }
    Ok(acc)
}

/// Pairwise energy distances between profiles. `power = 1` gives `D`,
/// `power = 2` gives `D²`.
pub fn energy_distance_matrix(labels: Vec<String>, profiles: &[SensitivityProfile], power: u8) -> Result<DistanceMatrix> {
    if labels.len() != profiles.len() {
        return Err(Error::SizeMismatch(format!(
            "{} labels for {} profiles",
            labels.len(),
            profiles.len()
        )));
    }
    DistanceMatrix::try_from_pairs(labels, |i, j| {
        let d_sq = energy_distance_density(&profiles[i], &profiles[j])?.max(0.0);
        Ok(if power == 2 { d_sq } else { d_sq.sqrt() })
    })
}

/// Analytic correlation matrix of a set of profiles.
pub fn analytic_correlation_matrix(profiles: &[SensitivityProfile]) -> Result<DMatrix<f64>> {
    let n = profiles.len();
    let l2: Vec<f64> = profiles.iter().map(profile_l2).collect();
    if l2.iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateProfile);
    }
    let mut corr = DMatrix::identity(n, n);
    for (i, j) in par::upper_pairs(n) {
        let c = overlap(&profiles[i], &profiles[j])? / (l2[i] * l2[j]).sqrt();
        corr[(i, j)] = c;
        corr[(j, i)] = c;
    }
    Ok(corr)
}
