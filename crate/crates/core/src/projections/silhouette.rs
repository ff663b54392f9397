use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::par;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SilhouetteResult {
    pub per_point: Vec<f64>,
    pub mean: f64,
}

/// Silhouette scores for cluster ids `0..K`.
///
/// `a(i)` is the mean distance to the other members of `i`'s cluster, `b(i)`
/// the smallest mean distance to another cluster, `s(i) = (b − a)/max(a, b)`.
/// Members of singleton clusters score 0, as do points with `a = b = 0`.
pub fn silhouette(d: &DistanceMatrix, labels: &[usize]) -> Result<SilhouetteResult> {
    let n = d.len();
    if labels.len() != n {
        return Err(Error::SizeMismatch(format!("{} cluster labels for {} points", labels.len(), n)));
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l] += 1);
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(empty));
    }
    if k < 2 {
        return Err(Error::SingleCluster);
    }

    let per_point = par::map_indexed(n, |i| {
        let own = labels[i];
        if sizes[own] == 1 {
            return 0.0;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += d.get(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom == 0.0 {
            0.0
        } else {
            (b - a) / denom
        }
    });
    let mean = per_point.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteResult { per_point, mean })
}
