use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng::seeded;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 20_000;
const TOLERANCE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// One `k`-vector per input vector.
    pub coordinates: Vec<Vec<f64>>,
    /// Unit principal directions, largest-magnitude entry positive.
    pub components: Vec<Vec<f64>>,
    /// Share of total variance per component, non-increasing.
    pub explained_variance_ratio: Vec<f64>,
}

/// Projects mean-centred `vectors` onto their top-`k` principal directions,
/// found by power iteration with deflation on the covariance matrix.
pub fn pca_project(vectors: &[Vec<f64>], k: usize, seed: u64) -> Result<Projection> {
    let n = vectors.len();
    let dim = vectors.first().map_or(0, Vec::len);
    if k == 0 || n < k + 1 {
        return Err(Error::Validation(format!(
            "PCA to {k} dimensions needs at least {} vectors, got {n}",
            k + 1
        )));
    }
    if dim < k || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Validation(format!(
            "vectors must share a dimension of at least {k}"
        )));
    }
    let mean: Vec<f64> = (0..dim)
        .map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / n as f64)
        .collect();
    let centred: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let mut cov = vec![vec![0.0; dim]; dim];
    for v in &centred {
        for i in 0..dim {
            for j in i..dim {
                cov[i][j] += v[i] * v[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    let total: f64 = (0..dim).map(|i| cov[i][i]).sum();
    if !(total > 0.0) {
        return Err(Error::Validation("input has zero variance".into()));
    }

    let mut rng = seeded(seed);
    let mut components = Vec::with_capacity(k);
    let mut ratios = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalise(&mut v);
        let mut lambda = 0.0;
        for _ in 0..MAX_ITERATIONS {
            let mut w = mat_vec(&cov, &v);
            let norm = normalise(&mut w);
            if norm == 0.0 {
                break;
            }
            let delta: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            let flipped: f64 = w.iter().zip(&v).map(|(a, b)| (a + b).abs()).sum();
            v = w;
            lambda = norm;
            if delta.min(flipped) < TOLERANCE {
                break;
            }
        }
        let rayleigh: f64 = v.iter().zip(mat_vec(&cov, &v)).map(|(a, b)| a * b).sum();
        lambda = if lambda == 0.0 { 0.0 } else { rayleigh };
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..dim {
            for j in 0..dim {
                cov[i][j] -= lambda * v[i] * v[j];
            }
        }
        ratios.push((lambda / total).max(0.0));
        components.push(v);
    }
    let coordinates = centred
        .iter()
        .map(|x| {
            components
                .iter()
                .map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    Ok(Projection {
        coordinates,
        components,
        explained_variance_ratio: ratios,
    })
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn normalise(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}
