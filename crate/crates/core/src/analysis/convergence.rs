//! Finite-dimensional diagnostics for the scaling limit `Ŝ_{α,c} → B^H_α`.
//!
//! For each scale `c` an ensemble of `Ŝ_{α,c}` is simulated on a fixed grid;
//! its empirical covariance is compared with the limiting covariance and the
//! marginal skewness and excess kurtosis are recorded (both vanish for the
//! Gaussian limit).

use serde::{Deserialize, Serialize};

use crate::analysis::estimators::{empirical_cov_matrix, matrix_distances, shape_moments};
use crate::error::{domain, Result};
use crate::grid::TimeGrid;
use crate::hfbm::{cov_matrix, HfbmParams};
use crate::noise::NoiseModel;
use crate::rng::derive_seed;
use crate::shotnoise::{simulate_ensemble, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleDiagnostics {
    pub c: f64,
    pub seed: u64,
    pub empirical: Vec<Vec<f64>>,
    pub max_abs_distance: f64,
    pub frobenius_distance: f64,
    pub skewness: Vec<f64>,
    pub excess_kurtosis: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub lambda: f64,
    pub noise: String,
    pub grid: TimeGrid,
    pub ensemble_size: usize,
    pub seed: u64,
    pub scales: Vec<f64>,
    /// Limiting covariance over the grid.
    pub target: Vec<Vec<f64>>,
    /// One entry per scale, in the order of `scales`.
    pub diagnostics: Vec<ScaleDiagnostics>,
}

impl ConvergenceReport {
    pub fn frobenius(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.frobenius_distance).collect()
    }
}

/// Parameters of a convergence run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSetup {
    pub alpha: f64,
    pub lambda: f64,
    pub noise: NoiseModel,
    pub grid: TimeGrid,
    pub scales: Vec<f64>,
    pub ensemble_size: usize,
    pub seed: u64,
}

impl ConvergenceSetup {
    /// Checks the hypotheses of the limit theorem on the noise model.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(domain!("convergence diagnostics need alpha in (1, 2), got {}", self.alpha));
        }
        if self.noise.limit_k2().is_none() {
            return Err(domain!("noise {} has no positive limit variance", self.noise.id()));
        }
        if !self.noise.is_bounded() {
            return Err(domain!(
                "noise {} has unbounded conditional variance; use a bounded profile",
                self.noise.id()
            ));
        }
        if self.grid.times()[0] <= 0.0 {
            return Err(domain!("convergence grid must consist of positive times"));
        }
        if self.scales.is_empty() || self.scales.iter().any(|c| !(*c >= 1.0)) {
            return Err(domain!("scales must be a non-empty list of values >= 1"));
        }
        if self.ensemble_size < 2 {
            return Err(domain!("ensemble size must be at least 2"));
        }
        Ok(())
    }
}

/// Runs the diagnostics; scale `i` uses the run seed derived from `(seed, i)`.
pub fn convergence_report(setup: &ConvergenceSetup) -> Result<ConvergenceReport> {
    setup.validate()?;
    let target = cov_matrix(HfbmParams::new(setup.alpha)?, &setup.grid)?.entries;
    let mut diagnostics = Vec::with_capacity(setup.scales.len());
    for (i, &c) in setup.scales.iter().enumerate() {
        let seed = derive_seed(setup.seed, i as u64);
        let config = SimConfig::scaled(setup.alpha, c, setup.noise, setup.lambda, setup.grid.clone(), seed)?
            .with_ensemble_size(setup.ensemble_size)?;
        let paths = simulate_ensemble(&config)?;
        let empirical = empirical_cov_matrix(&paths)?;
        let (max_abs_distance, frobenius_distance) = matrix_distances(&empirical, &target);
        let (skewness, excess_kurtosis) = (0..setup.grid.len())
            .map(|j| {
                let column: Vec<f64> = paths.iter().map(|p| p.values[j]).collect();
                shape_moments(&column)
            })
            .unzip();
        diagnostics.push(ScaleDiagnostics {
            c,
            seed,
            empirical,
            max_abs_distance,
            frobenius_distance,
            skewness,
            excess_kurtosis,
        });
    }
    Ok(ConvergenceReport {
        alpha: setup.alpha,
        lambda: setup.lambda,
        noise: setup.noise.id(),
        grid: setup.grid.clone(),
        ensemble_size: setup.ensemble_size,
        seed: setup.seed,
        scales: setup.scales.clone(),
        target,
        diagnostics,
    })
}
