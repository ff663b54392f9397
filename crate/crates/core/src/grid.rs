//! Uniform grids over the risk-factor space and sensitivity densities on them.
//!
//! All integrals in the crate use the same trapezoid weights: `Δω` at interior
//! nodes and `Δω/2` at the two endpoints. Normalization, overlaps, CDFs and the
//! simulated quadrature all share this rule, so analytic and simulated moments
//! agree to the same order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lower: f64,
    upper: f64,
    points: usize,
    spacing: f64,
}

impl Grid {
    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Position of node `k`.
    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.upper
        } else {
            self.lower + k as f64 * self.spacing
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.node(k)).collect()
    }

    /// Quadrature weight of node `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.points {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.weight(k)).collect()
    }

    /// Trapezoid integral of node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.points);
        values.iter().enumerate().map(|(k, v)| v * self.weight(k)).sum()
    }

    /// Refined grid with `2M - 1` points over the same range.
    pub fn refine(&self) -> Grid {
        build_grid(self.lower, self.upper, 2 * self.points - 1).expect("refinement of a valid grid")
    }
}

/// Builds a uniform grid of `points` nodes spanning `[lower, upper]`.
pub fn build_grid(lower: f64, upper: f64, points: usize) -> Result<Grid> {
    if !(lower.is_finite() && upper.is_finite()) || upper <= lower {
        return Err(Error::NonPositiveRange { lower, upper });
    }
    if points < 2 {
        return Err(Error::TooFewPoints(points));
    }
    let spacing = (upper - lower) / (points - 1) as f64;
    Ok(Grid {
        lower,
        upper,
        points,
        spacing,
    })
}

/// An asset's sensitivity density sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityProfile {
    grid: Grid,
    density: Vec<f64>,
}

impl SensitivityProfile {
    /// Wraps node values that already integrate to one.
    pub fn from_density(grid: Grid, density: Vec<f64>) -> Result<Self> {
        check_values(&grid, &density)?;
        let mass = grid.integrate(&density);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProfile(format!("density integrates to {mass}, not 1")));
        }
        Ok(Self { grid, density })
    }

    /// Rescales nonnegative node values so they integrate to one.
    pub fn normalized(grid: Grid, mut values: Vec<f64>) -> Result<Self> {
        check_values(&grid, &values)?;
        let mass = grid.integrate(&values);
        if mass <= 0.0 {
            return Err(Error::InvalidProfile("density has zero mass on the grid".into()));
        }
        values.iter_mut().for_each(|v| *v /= mass);
        Ok(Self {
            grid,
            density: values,
        })
    }

    pub fn uniform(grid: Grid) -> Self {
        let height = 1.0 / (grid.upper - grid.lower);
        Self {
            grid,
            density: vec![height; grid.points],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub(crate) fn same_grid(&self, other: &SensitivityProfile) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

fn check_values(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.points {
        return Err(Error::InvalidProfile(format!(
            "expected {} node values, got {}",
            grid.points,
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidProfile(format!("density value {v} is negative or non-finite")));
    }
    Ok(())
}

/// One Gaussian bump of a mixture density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

impl MixtureComponent {
    pub fn new(weight: f64, mean: f64, std: f64) -> Self {
        Self { weight, mean, std }
    }
}

/// Gaussian-mixture density evaluated on the grid and renormalized to unit
/// mass over `[lower, upper]`. Only weight ratios matter.
pub fn mixture_profile(grid: Grid, components: &[MixtureComponent]) -> Result<SensitivityProfile> {
    if components.is_empty() {
        return Err(Error::EmptyMixture);
    }
    for c in components {
        if !(c.weight > 0.0 && c.weight.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: "weight",
                value: c.weight,
            });
        }
        if !(c.std > 0.0 && c.std.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: "std",
                value: c.std,
            });
        }
        if !c.mean.is_finite() {
            return Err(Error::InvalidProfile(format!("component mean {} is not finite", c.mean)));
        }
    }

    // canonical order so the floating-point sum does not depend on input order
    let mut sorted = components.to_vec();
    sorted.sort_by(|a, b| {
        a.mean
            .total_cmp(&b.mean)
            .then(a.std.total_cmp(&b.std))
            .then(a.weight.total_cmp(&b.weight))
    });
    let total: f64 = sorted.iter().map(|c| c.weight).sum();

    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let values = (0..grid.points)
        .map(|k| {
            let x = grid.node(k);
            sorted
                .iter()
                .map(|c| {
                    let z = (x - c.mean) / c.std;
                    (c.weight / total) * inv_sqrt_2pi / c.std * (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect();
    SensitivityProfile::normalized(grid, values)
}

/// `∫β² dω` of a profile.
pub fn profile_l2(profile: &SensitivityProfile) -> f64 {
    profile
        .density
        .iter()
        .enumerate()
        .map(|(k, b)| b * b * profile.grid.weight(k))
        .sum()
}

/// `∫β_i β_j dω` of two profiles on the same grid.
pub fn overlap(a: &SensitivityProfile, b: &SensitivityProfile) -> Result<f64> {
    a.same_grid(b)?;
    Ok(a.density
        .iter()
        .zip(&b.density)
        .enumerate()
        .map(|(k, (x, y))| x * y * a.grid.weight(k))
        .sum())
}
