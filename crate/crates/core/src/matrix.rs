//! Labelled symmetric distance matrices.

use crate::error::{Error, Result};
use crate::par;
use nalgebra::DMatrix;

const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric nonnegative `n × n` matrix with zero diagonal and asset labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    entries: DMatrix<f64>,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, entries: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::SizeMismatch(format!(
                "{} labels for a {}x{} matrix",
                n,
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            if entries[(i, i)] != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "diagonal entry {i} is {}",
                    entries[(i, i)]
                )));
            }
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entry ({i}, {j}) = {v} is negative or non-finite"
                    )));
                }
                if (v - entries[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(Self { labels, entries })
    }

    /// Fills the upper triangle with `f(i, j)` (in parallel) and mirrors it.
    pub fn from_pairs<F>(labels: Vec<String>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let n = labels.len();
        let pairs = par::upper_pairs(n);
        let values = par::map_indexed(pairs.len(), |p| {
            let (i, j) = pairs[p];
            f(i, j)
        });
        let mut entries = DMatrix::zeros(n, n);
        for (&(i, j), v) in pairs.iter().zip(values) {
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
        Self::new(labels, entries)
    }

    /// Same as [`from_pairs`](Self::from_pairs) with the pair function fallible.
    pub fn try_from_pairs<F>(labels: Vec<String>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync + Send,
    {
        let n = labels.len();
        let pairs = par::upper_pairs(n);
        let values = par::map_indexed(pairs.len(), |p| {
            let (i, j) = pairs[p];
            f(i, j)
        });
        let mut entries = DMatrix::zeros(n, n);
        for (&(i, j), v) in pairs.iter().zip(values) {
            let v = v?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
        Self::new(labels, entries)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Elementwise power of the entries (e.g. `2` turns `D` into `D²`).
    pub fn powi(&self, exponent: i32) -> DistanceMatrix {
        DistanceMatrix {
            labels: self.labels.clone(),
            entries: self.entries.map(|v| v.powi(exponent)),
        }
    }

    /// Restricts to the given labels, in the given order.
    pub fn select(&self, labels: &[String]) -> Result<DistanceMatrix> {
        let idx = labels
            .iter()
            .map(|l| {
                self.labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| Error::LabelMismatch(format!("label `{l}` not in matrix")))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = idx.len();
        let entries = DMatrix::from_fn(n, n, |i, j| self.entries[(idx[i], idx[j])]);
        Ok(DistanceMatrix {
            labels: labels.to_vec(),
            entries,
        })
    }

    /// Applies one relabeling to rows and columns: entry `(i, j)` of the
    /// result is entry `(perm[i], perm[j])` of `self`; labels follow.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        let n = self.len();
        assert_eq!(perm.len(), n);
        DistanceMatrix {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
            entries: DMatrix::from_fn(n, n, |i, j| self.entries[(perm[i], perm[j])]),
        }
    }

    /// CSV with a header row of labels and one labelled row per asset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("asset");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.len() {
                out.push(',');
                out.push_str(&format!("{}", self.entries[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

/// Euclidean distances between the rows of `coords`.
pub fn euclidean_distances(labels: Vec<String>, coords: &DMatrix<f64>) -> Result<DistanceMatrix> {
    if labels.len() != coords.nrows() {
        return Err(Error::SizeMismatch(format!(
            "{} labels for {} coordinate rows",
            labels.len(),
            coords.nrows()
        )));
    }
    DistanceMatrix::from_pairs(labels, |i, j| (coords.row(i) - coords.row(j)).norm())
}
