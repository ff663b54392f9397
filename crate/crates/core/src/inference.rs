//! Mantel statistic between two distance matrices and its permutation test.

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::numeric::{exact_sum, ExactSum};
use crate::par;
use crate::rng::{substream, Purpose};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub const DEFAULT_PERMUTATIONS: usize = 9999;
pub const MIN_PERMUTATIONS: usize = 99;
pub const MIN_ASSETS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MantelVariant {
    /// Uncentered cosine `Σ w d / √(Σ w² Σ d²)` over all entries.
    #[default]
    Raw,
    /// Pearson correlation of the off-diagonal upper-triangle entries.
    Centered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MantelResult {
    pub z: f64,
    pub p_value: f64,
    pub permutations: usize,
    pub variant: MantelVariant,
    pub seed: u64,
}

fn check_pair(w: &DistanceMatrix, d: &DistanceMatrix) -> Result<()> {
    if w.len() != d.len() {
        return Err(Error::SizeMismatch(format!("{}x{} vs {}x{}", w.len(), w.len(), d.len(), d.len())));
    }
    if w.labels() != d.labels() {
        return Err(Error::LabelMismatch("distance matrices list assets in different orders".into()));
    }
    if w.len() < MIN_ASSETS {
        return Err(Error::TooFewAssets {
            required: MIN_ASSETS,
            found: w.len(),
        });
    }
    Ok(())
}

// Permutation-invariant parts of the statistic, so each permutation only
// needs the cross-product sum.
struct Prepared {
    n: usize,
    w: Vec<f64>,
    d: Vec<f64>,
    variant: MantelVariant,
    w_mean: f64,
    d_mean: f64,
    norm: f64,
}

impl Prepared {
    fn new(w: &DistanceMatrix, d: &DistanceMatrix, variant: MantelVariant) -> Self {
        let n = w.len();
        let flat = |m: &DistanceMatrix| -> Vec<f64> {
            let mut v = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    v.push(m.get(i, j));
                }
            }
            v
        };
        let wv = flat(w);
        let dv = flat(d);
        match variant {
            MantelVariant::Raw => {
                let sw = exact_sum(wv.iter().map(|x| x * x));
                let sd = exact_sum(dv.iter().map(|x| x * x));
                Self {
                    n,
                    w: wv,
                    d: dv,
                    variant,
                    w_mean: 0.0,
                    d_mean: 0.0,
                    norm: (sw * sd).sqrt(),
                }
            }
            MantelVariant::Centered => {
                let pairs = par::upper_pairs(n);
                let count = pairs.len() as f64;
                let w_mean = exact_sum(pairs.iter().map(|&(i, j)| wv[i * n + j])) / count;
                let d_mean = exact_sum(pairs.iter().map(|&(i, j)| dv[i * n + j])) / count;
                let sw = exact_sum(pairs.iter().map(|&(i, j)| (wv[i * n + j] - w_mean).powi(2)));
                let sd = exact_sum(pairs.iter().map(|&(i, j)| (dv[i * n + j] - d_mean).powi(2)));
                Self {
                    n,
                    w: wv,
                    d: dv,
                    variant,
                    w_mean,
                    d_mean,
                    norm: (sw * sd).sqrt(),
                }
            }
        }
    }

    // statistic with d relabeled by `perm`; the cross sum is correctly
    // rounded, so a joint relabeling of w and d gives the same bits
    fn statistic(&self, perm: &[usize]) -> f64 {
        let n = self.n;
        let mut cross = ExactSum::new();
        match self.variant {
            MantelVariant::Raw => {
                for i in 0..n {
                    let row = perm[i] * n;
                    for (j, &pj) in perm.iter().enumerate() {
                        cross.add(self.w[i * n + j] * self.d[row + pj]);
                    }
                }
            }
            MantelVariant::Centered => {
                for i in 0..n {
                    let row = perm[i] * n;
                    for (j, &pj) in perm.iter().enumerate().skip(i + 1) {
                        cross.add((self.w[i * n + j] - self.w_mean) * (self.d[row + pj] - self.d_mean));
                    }
                }
            }
        }
        if self.norm == 0.0 {
            0.0
        } else {
            cross.value() / self.norm
        }
    }
}

/// Mantel statistic of `w` against `d`.
pub fn mantel_statistic(w: &DistanceMatrix, d: &DistanceMatrix, variant: MantelVariant) -> Result<f64> {
    check_pair(w, d)?;
    let identity: Vec<usize> = (0..w.len()).collect();
    Ok(Prepared::new(w, d, variant).statistic(&identity))
}

/// One-sided (upper) permutation test. Each iteration relabels rows and
/// columns of `d` jointly; `p = (1 + #{Z_perm ≥ Z_obs}) / (1 + permutations)`.
pub fn mantel_test(
    w: &DistanceMatrix,
    d: &DistanceMatrix,
    permutations: usize,
    seed: u64,
    variant: MantelVariant,
) -> Result<MantelResult> {
    check_pair(w, d)?;
    if permutations < MIN_PERMUTATIONS {
        return Err(Error::TooFewPermutations {
            required: MIN_PERMUTATIONS,
            found: permutations,
        });
    }
    let prepared = Prepared::new(w, d, variant);
    let n = w.len();
    let identity: Vec<usize> = (0..n).collect();
    let z = prepared.statistic(&identity);
    let exceed = par::count_indexed(permutations, |k| {
        let mut rng = substream(seed, Purpose::Permutation, k as u64);
        let mut perm = identity.clone();
        perm.shuffle(&mut rng);
        prepared.statistic(&perm) >= z
    });
    Ok(MantelResult {
        z,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
        permutations,
        variant,
        seed,
    })
}
