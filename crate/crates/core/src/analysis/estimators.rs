//! Monte Carlo estimators over path ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::shotnoise::SamplePath;

/// A Monte Carlo estimate with its standard error and, optionally, the value
/// it is meant to reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub quantity: String,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub target: Option<f64>,
    pub z_score: Option<f64>,
}

impl EstimatorReport {
    pub fn new(quantity: impl Into<String>, estimate: f64, std_error: f64, n_samples: usize) -> Self {
        Self {
            quantity: quantity.into(),
            estimate,
            std_error,
            n_samples,
            target: None,
            z_score: None,
        }
    }

    /// Attaches a reference value and computes `(estimate - target)/std_error`.
    pub fn with_target(mut self, target: f64) -> Self {
        let diff = self.estimate - target;
        self.target = Some(target);
        self.z_score = Some(if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        });
        self
    }

    pub fn within(&self, z_max: f64) -> bool {
        self.z_score.is_some_and(|z| z.abs() <= z_max)
    }
}

fn common_grid(ensemble: &[SamplePath]) -> Result<&TimeGrid> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::Domain("ensemble is empty".into()))?;
    if ensemble.iter().any(|p| p.grid != first.grid) {
        return Err(Error::Grid("ensemble paths use different grids".into()));
    }
    Ok(&first.grid)
}

fn column(ensemble: &[SamplePath], t: f64) -> Result<Vec<f64>> {
    let grid = common_grid(ensemble)?;
    let i = grid
        .position(t)
        .ok_or_else(|| Error::Grid(format!("time {t} is not on the ensemble grid")))?;
    Ok(ensemble.iter().map(|p| p.values[i]).collect())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample mean of `values` with its standard error.
pub fn sample_mean(quantity: &str, values: &[f64]) -> Result<EstimatorReport> {
    let m = values.len();
    if m < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let mu = mean(values);
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
    Ok(EstimatorReport::new(quantity, mu, (var / m as f64).sqrt(), m))
}

/// Unbiased covariance of the ensemble values at `s` and `t`.
///
/// The standard error is the sample deviation of the centered products
/// divided by `√M`.
pub fn empirical_cov(ensemble: &[SamplePath], s: f64, t: f64) -> Result<EstimatorReport> {
    let x = column(ensemble, s)?;
    let y = column(ensemble, t)?;
    cov_of(&format!("cov({s}, {t})"), &x, &y)
}

pub(crate) fn cov_of(quantity: &str, x: &[f64], y: &[f64]) -> Result<EstimatorReport> {
    let m = x.len();
    if m < 2 {
        return Err(Error::Domain("covariance needs an ensemble of at least two paths".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let products: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let estimate = products.iter().sum::<f64>() / (m - 1) as f64;
    let pm = mean(&products);
    let pvar = products.iter().map(|p| (p - pm).powi(2)).sum::<f64>() / (m - 1) as f64;
    Ok(EstimatorReport::new(quantity, estimate, (pvar / m as f64).sqrt(), m))
}

/// Empirical covariance matrix (with `M - 1` normalization) over the grid.
pub fn empirical_cov_matrix(ensemble: &[SamplePath]) -> Result<Vec<Vec<f64>>> {
    let grid = common_grid(ensemble)?;
    let m = ensemble.len();
    if m < 2 {
        return Err(Error::Domain("covariance needs an ensemble of at least two paths".into()));
    }
    let n = grid.len();
    let means: Vec<f64> = (0..n)
        .map(|i| ensemble.iter().map(|p| p.values[i]).sum::<f64>() / m as f64)
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for p in ensemble {
        for (row, (&vi, &mi)) in out.iter_mut().zip(p.values.iter().zip(&means)) {
            let di = vi - mi;
            for (cell, (&vj, &mj)) in row.iter_mut().zip(p.values.iter().zip(&means)) {
                *cell += di * (vj - mj);
            }
        }
    }
    let norm = (m - 1) as f64;
    out.iter_mut().flatten().for_each(|v| *v /= norm);
    Ok(out)
}

/// Skewness and excess kurtosis from central sample moments.
pub fn shape_moments(values: &[f64]) -> (f64, f64) {
    let mu = mean(values);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let n = values.len() as f64;
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// Maximum absolute and Frobenius distances between two square matrices.
pub fn matrix_distances(a: &[Vec<f64>], b: &[Vec<f64>]) -> (f64, f64) {
    let mut max_abs: f64 = 0.0;
    let mut sq = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            let d = (x - y).abs();
            max_abs = max_abs.max(d);
            sq += d * d;
        }
    }
    (max_abs, sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shotnoise::PathMeta;

    fn path(grid: &TimeGrid, values: Vec<f64>) -> SamplePath {
        SamplePath {
            grid: grid.clone(),
            values,
            meta: PathMeta {
                kernel: None,
                noise: None,
                seed: 0,
                path_index: 0,
                scale: None,
            },
        }
    }

    #[test]
    fn zero_paths() {
        let g = TimeGrid::new(vec![1.0, 2.0]).unwrap();
        let e: Vec<_> = (0..10).map(|_| path(&g, vec![0.0, 0.0])).collect();
        let r = empirical_cov(&e, 1.0, 2.0).unwrap().with_target(0.0);
        assert_eq!((r.estimate, r.std_error, r.z_score), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn small_hand_case() {
        let g = TimeGrid::new(vec![1.0, 2.0]).unwrap();
        let e = vec![path(&g, vec![1.0, 2.0]), path(&g, vec![3.0, 6.0]), path(&g, vec![5.0, 4.0])];
        // means 3 and 4; products 4, 0, 0 → 4/2
        let r = empirical_cov(&e, 1.0, 2.0).unwrap();
        assert_eq!(r.estimate, 2.0);
        let m = empirical_cov_matrix(&e).unwrap();
        assert_eq!(m[0][1], 2.0);
        assert_eq!(m[0][0], 4.0);
        assert_eq!(m[1][1], 4.0);
    }

    #[test]
    fn grid_errors() {
        let g = TimeGrid::new(vec![1.0, 2.0]).unwrap();
        let h = TimeGrid::new(vec![1.0, 3.0]).unwrap();
        let e = vec![path(&g, vec![1.0, 2.0]), path(&h, vec![3.0, 6.0])];
        assert!(matches!(empirical_cov(&e, 1.0, 2.0), Err(Error::Grid(_))));
        let e = vec![path(&g, vec![1.0, 2.0]), path(&g, vec![3.0, 6.0])];
        assert!(matches!(empirical_cov(&e, 1.0, 5.0), Err(Error::Grid(_))));
        assert!(empirical_cov(&e[..1], 1.0, 2.0).is_err());
    }

    #[test]
    fn shape_of_symmetric_two_point() {
        let (skew, kurt) = shape_moments(&[-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(skew, 0.0);
        assert_eq!(kurt, -2.0);
    }

    #[test]
    fn distances() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = vec![vec![1.0, 3.0], vec![0.0, 5.0]];
        assert_eq!(matrix_distances(&a, &b), (4.0, 5.0));
    }
}
