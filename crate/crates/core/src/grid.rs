use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Strictly increasing, finite, non-negative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(domain!("time grid is empty"));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(domain!("grid times must be finite and non-negative, got {t}"));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(domain!("grid must be strictly increasing ({} then {})", w[0], w[1]));
        }
        Ok(Self(times))
    }

    /// `points` evenly spaced times from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Self> {
        match points {
            0 => Err(domain!("grid needs at least one point")),
            1 => Self::new(vec![start]),
            _ => {
                let step = (stop - start) / (points - 1) as f64;
                let mut times: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
                times[points - 1] = stop;
                Self::new(times)
            }
        }
    }

    /// The partition `t_k = T k / n`, `k = 0..=n`.
    pub fn uniform(horizon: f64, n: usize) -> Result<Self> {
        if !(horizon > 0.0) || n == 0 {
            return Err(domain!("uniform partition needs T > 0 and n >= 1"));
        }
        Self::new((0..=n).map(|k| horizon * k as f64 / n as f64).collect())
    }

    /// `points` log-spaced times from `start` to `stop` inclusive.
    pub fn logspace(start: f64, stop: f64, points: usize) -> Result<Self> {
        if !(start > 0.0 && stop > start) {
            return Err(domain!("logspace needs 0 < start < stop"));
        }
        if points < 2 {
            return Err(domain!("logspace needs at least two points"));
        }
        let (a, b) = (start.ln(), stop.ln());
        let step = (b - a) / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|k| (a + step * k as f64).exp()).collect();
        times[0] = start;
        times[points - 1] = stop;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.0.last().expect("grid is non-empty")
    }

    /// Index of `t`, allowing for rounding in how the grid was built.
    pub fn position(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1e-300);
        self.0.iter().position(|x| (x - t).abs() <= tol)
    }

    /// True when consecutive spacings agree to relative `1e-9`.
    pub fn is_uniform(&self) -> bool {
        if self.0.len() < 3 {
            return true;
        }
        let step = (self.last() - self.0[0]) / (self.0.len() - 1) as f64;
        self.0.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![-1.0, 1.0]).is_err());
        let g = TimeGrid::linspace(0.0, 50.0, 500).unwrap();
        assert_eq!(g.len(), 500);
        assert_eq!(g.last(), 50.0);
        assert!(g.is_uniform());
        assert!(!TimeGrid::logspace(0.1, 10.0, 5).unwrap().is_uniform());
        assert_eq!(TimeGrid::uniform(1.0, 4).unwrap().times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.position(g.times()[37]), Some(37));
    }
}
