//! Hadamard fractional Brownian motion.
//!
//! A centered Gaussian process with `Var B(t) = t` and, for `s ≠ t`,
//!
//! ```text
//! Cov(B(s), B(t)) = C_α (s ∧ t) Ψ((1-α)/2, 1-α; log((s ∨ t)/(s ∧ t))),
//! C_α = 2^{1-α} √π / Γ(α/2).
//! ```
//!
//! Paths are sampled exactly on a grid from the Cholesky factor of this
//! covariance.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::rng::path_rng;
use crate::shotnoise::{PathMeta, SamplePath};
use crate::specfun::{gamma, tricomi_psi, PsiArgs};

/// Index `α` of the process; `α = 1` is standard Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HfbmParams {
    alpha: f64,
}

impl HfbmParams {
    /// `alpha` in `(0, 1) ∪ (1, 2)`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
            return Err(domain!("alpha must lie in (0, 1) or (1, 2), got {alpha}"));
        }
        Ok(Self { alpha })
    }

    /// The degenerate member with covariance `min(s, t)`.
    pub fn brownian() -> Self {
        Self { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_brownian(&self) -> bool {
        self.alpha == 1.0
    }
}

/// `C_α = 2^{1-α} √π / Γ(α/2)`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(domain!("c_alpha requires alpha > 0, got {alpha}"));
    }
    Ok((1.0 - alpha).exp2() * std::f64::consts::PI.sqrt() / gamma(0.5 * alpha)?)
}

/// `Cov(B(s), B(t))` for `s, t > 0`.
pub fn hfbm_cov(params: HfbmParams, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) || !(s.is_finite() && t.is_finite()) {
        return Err(domain!("hfbm_cov requires positive times, got ({s}, {t})"));
    }
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    if lo == hi {
        return Ok(lo);
    }
    if params.is_brownian() {
        return Ok(lo);
    }
    let alpha = params.alpha;
    let psi = tricomi_psi(PsiArgs::new(0.5 * (1.0 - alpha), 1.0 - alpha, (hi / lo).ln()))?;
    Ok(c_alpha(alpha)? * lo * psi)
}

/// `ρ(s, t) = E[B(t) - B(s)]²` for `0 ≤ s ≤ t`.
pub fn increment_variance(params: HfbmParams, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0 && t.is_finite()) {
        return Err(domain!("increment_variance requires 0 <= s, got s = {s}"));
    }
    if s > t {
        return Err(domain!("increment_variance requires s <= t, got ({s}, {t})"));
    }
    if s == 0.0 {
        return Ok(t);
    }
    Ok(t + s - 2.0 * hfbm_cov(params, s, t)?)
}

/// Covariance of the process over a grid. A `t = 0` entry, if present, gives
/// an all-zero row and column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    pub grid: TimeGrid,
    /// Row-major `n × n` entries.
    pub entries: Vec<Vec<f64>>,
}

impl CovMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// Lower Cholesky factor of the block at positive times.
    pub fn factor(&self) -> Result<CholeskyFactor> {
        let active: Vec<usize> = (0..self.len()).filter(|&i| self.grid.times()[i] > 0.0).collect();
        let n = active.len();
        let block = DMatrix::from_fn(n, n, |i, j| self.entries[active[i]][active[j]]);
        let scale = if n == 0 { 0.0 } else { block.trace() / n as f64 };
        for jitter in [0.0, 1e-14 * scale, 1e-12 * scale] {
            let mut m = block.clone();
            for i in 0..n {
                m[(i, i)] += jitter;
            }
            if let Some(chol) = Cholesky::new(m) {
                return Ok(CholeskyFactor {
                    lower: chol.l(),
                    active,
                    size: self.len(),
                    jitter,
                });
            }
        }
        Err(Error::Numerical(format!(
            "covariance over {n} grid points is not positive definite even with jitter"
        )))
    }
}

/// Factor `L` with `L Lᵀ = Σ` over the positive grid times.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: DMatrix<f64>,
    active: Vec<usize>,
    size: usize,
    jitter: f64,
}

impl CholeskyFactor {
    /// Diagonal jitter that was needed for the factorization to succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// Maps standard normals to a sample on the full grid.
    pub fn apply(&self, normals: &[f64]) -> Vec<f64> {
        let z = DVector::from_column_slice(normals);
        let x = &self.lower * z;
        let mut out = vec![0.0; self.size];
        for (k, &i) in self.active.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.active.len()
    }
}

/// Covariance matrix `σ^α` over `grid`, checked to be positive semidefinite.
pub fn cov_matrix(params: HfbmParams, grid: &TimeGrid) -> Result<CovMatrix> {
    let times = grid.times();
    let n = times.len();
    let mut entries = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            if times[i] > 0.0 && times[j] > 0.0 {
                let v = hfbm_cov(params, times[i], times[j])?;
                entries[i][j] = v;
                entries[j][i] = v;
            }
        }
    }
    let cov = CovMatrix {
        grid: grid.clone(),
        entries,
    };
    cov.factor()?;
    Ok(cov)
}

/// `ensemble_size` exact samples on `grid`; path `m` uses stream `(seed, m)`.
pub fn sample_hfbm(params: HfbmParams, grid: &TimeGrid, ensemble_size: usize, seed: u64) -> Result<Vec<SamplePath>> {
    if ensemble_size == 0 {
        return Err(domain!("ensemble size must be at least 1"));
    }
    let factor = cov_matrix(params, grid)?.factor()?;
    let dim = factor.dimension();
    Ok((0..ensemble_size as u64)
        .into_par_iter()
        .map(|m| {
            let mut rng = path_rng(seed, m);
            let normals: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            SamplePath {
                grid: grid.clone(),
                values: factor.apply(&normals),
                meta: PathMeta {
                    kernel: None,
                    noise: Some(format!("hfbm:alpha={}", params.alpha)),
                    seed,
                    path_index: m,
                    scale: None,
                },
            }
        })
        .collect())
}

pub mod properties {
    //! Randomized checks of the structural properties of `ρ(s, t)`.

    use rand::Rng;
    use serde::{Deserialize, Serialize};

    use super::{increment_variance, HfbmParams};
    use crate::error::Result;
    use crate::rng::path_rng;

    /// Step used for the small-increment check.
    pub const SMALL_STEP: f64 = 1e-6;
    /// Bound that `ρ(t, t + SMALL_STEP)` must respect.
    pub const SMALL_INCREMENT_BOUND: f64 = 1e-3;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct PropertyCheck {
        pub name: String,
        pub passed: usize,
        pub failed: usize,
        /// Largest violation observed, in the units of ρ.
        pub worst_violation: f64,
    }

    impl PropertyCheck {
        fn new(name: &str) -> Self {
            Self {
                name: name.to_string(),
                passed: 0,
                failed: 0,
                worst_violation: 0.0,
            }
        }

        /// Records `lhs ≤ rhs + tol`.
        fn record(&mut self, lhs: f64, rhs: f64, tol: f64) {
            let excess = lhs - rhs;
            if excess <= tol && excess.is_finite() {
                self.passed += 1;
            } else {
                self.failed += 1;
            }
            if excess > self.worst_violation || !excess.is_finite() {
                self.worst_violation = excess;
            }
        }
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct PropertyReport {
        pub alpha: f64,
        pub triples: usize,
        pub tolerance: f64,
        pub checks: Vec<PropertyCheck>,
    }

    impl PropertyReport {
        pub fn all_passed(&self) -> bool {
            self.checks.iter().all(|c| c.failed == 0)
        }
    }

    /// Runs the property suite on `triples` random `0 ≤ r ≤ s ≤ t ≤ 10`.
    ///
    /// About one triple in twenty has `r = 0` so the origin is exercised.
    pub fn check(params: HfbmParams, triples: usize, tolerance: f64, seed: u64) -> Result<PropertyReport> {
        let rho = |a: f64, b: f64| increment_variance(params, a, b);
        let mut nonneg = PropertyCheck::new("non_negative");
        let mut superadd = PropertyCheck::new("super_additive");
        let mut mono_right = PropertyCheck::new("non_decreasing_right");
        let mut mono_left = PropertyCheck::new("non_increasing_left");
        let mut small = PropertyCheck::new("small_increment");
        let mut origin = PropertyCheck::new("origin_continuity");

        // ρ(0, 0) = 0
        nonneg.record(rho(0.0, 0.0)?.abs(), 0.0, tolerance);

        let mut rng = path_rng(seed, 0);
        for _ in 0..triples {
            let mut v = [
                rng.random_range(0.0..10.0),
                rng.random_range(0.0..10.0),
                rng.random_range(0.0..10.0),
            ];
            v.sort_by(f64::total_cmp);
            if rng.random_range(0..20) == 0 {
                v[0] = 0.0;
            }
            let [r, s, t] = v;
            let (rs, st, rt) = (rho(r, s)?, rho(s, t)?, rho(r, t)?);

            nonneg.record(0.0, rs, tolerance);
            nonneg.record(0.0, st, tolerance);
            nonneg.record(0.0, rt, tolerance);
            superadd.record(rs + st, rt, tolerance);
            // ρ(r, s) ≤ ρ(r, t) and ρ(s, t) ≤ ρ(r, t) for r ≤ s ≤ t
            mono_right.record(rs, rt, tolerance);
            mono_left.record(st, rt, tolerance);
            if s > 0.0 {
                small.record(rho(s, s + SMALL_STEP)?, SMALL_INCREMENT_BOUND, 0.0);
            }
            origin.record((rho(0.0, t)? - t).abs(), 0.0, 0.0);
        }
        Ok(PropertyReport {
            alpha: params.alpha(),
            triples,
            tolerance,
            checks: vec![nonneg, superadd, mono_right, mono_left, small, origin],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn c_alpha_values() {
        assert!(rel(c_alpha(1.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(c_alpha(2.0).unwrap(), std::f64::consts::PI.sqrt() / 2.0) < 1e-15);
        // duplication: Γ((α+1)/2)/Γ(α) = C_α
        let a = 1.5;
        let dup = (ln_gamma(0.5 * (a + 1.0)).unwrap() - ln_gamma(a).unwrap()).exp();
        assert!(rel(dup, c_alpha(a).unwrap()) < 1e-12);
    }

    #[test]
    fn params_domain() {
        for a in [0.0, 1.0, 2.0, -0.5, 2.5] {
            assert!(HfbmParams::new(a).is_err());
        }
        assert!(HfbmParams::brownian().is_brownian());
    }

    #[test]
    fn covariance_examples() {
        let p = HfbmParams::new(1.5).unwrap();
        assert_eq!(hfbm_cov(p, 2.5, 2.5).unwrap(), 2.5);
        let (s, t, c) = (0.7, 1.9, 3.0);
        assert!(rel(hfbm_cov(p, c * s, c * t).unwrap() / c, hfbm_cov(p, s, t).unwrap()) < 1e-12);
        // mpmath quadrature of (1/Γ(α)) ∫₀¹ log(1/x)^{1/4} log(2/x)^{1/4} dx
        assert!(rel(hfbm_cov(p, 1.0, 2.0).unwrap(), 1.176_747_291_744_744_8) < 1e-10);
        assert!(hfbm_cov(p, 0.0, 1.0).is_err());
    }

    #[test]
    fn covariance_matches_integral_oracle() {
        // Independent route: the defining integral, done here with s = 1 and x = e^{-w}.
        for alpha in [0.6, 1.2, 1.5, 1.8] {
            let p = HfbmParams::new(alpha).unwrap();
            let beta = 0.5 * (alpha - 1.0);
            let t: f64 = 2.0;
            let l = t.ln();
            let f = |w: f64| w.powf(beta) * (l + w).powf(beta) * (-w).exp();
            let opts = QuadOptions::default();
            let oracle = (integrate(f, 0.0, 1.0, opts).unwrap().value
                + integrate(f, 1.0, 80.0, opts).unwrap().value)
                / gamma(alpha).unwrap();
            assert!(rel(hfbm_cov(p, 1.0, t).unwrap(), oracle) < 1e-6, "alpha {alpha}");
        }
    }

    #[test]
    fn increment_variance_examples() {
        let p = HfbmParams::new(1.5).unwrap();
        assert_eq!(increment_variance(p, 0.0, 3.0).unwrap(), 3.0);
        assert!(increment_variance(p, 1.3, 1.3).unwrap().abs() < 1e-15);
        // ρ(1, 2) from (1/Γ(α)) ∫₀² [log₊(2/x)^β − log₊(1/x)^β]² dx with mpmath
        assert!(rel(increment_variance(p, 1.0, 2.0).unwrap(), 0.646_505_416_510_510_5) < 1e-9);
        assert!(increment_variance(p, 2.0, 1.0).is_err());
    }

    #[test]
    fn brownian_matrix() {
        let grid = TimeGrid::new(vec![1.0, 2.0, 3.0]).unwrap();
        let m = cov_matrix(HfbmParams::brownian(), &grid).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), grid.times()[i.min(j)]);
            }
        }
        let one = cov_matrix(HfbmParams::new(1.3).unwrap(), &TimeGrid::new(vec![2.0]).unwrap()).unwrap();
        assert_eq!(one.entries, vec![vec![2.0]]);
    }

    #[test]
    fn factor_reproduces_matrix() {
        let grid = TimeGrid::new(vec![0.0, 0.5, 1.0, 2.0, 4.0]).unwrap();
        let m = cov_matrix(HfbmParams::new(1.5).unwrap(), &grid).unwrap();
        assert!(m.entries[0].iter().all(|&v| v == 0.0));
        let f = m.factor().unwrap();
        assert_eq!(f.dimension(), 4);
        let l = f.lower();
        let rebuilt = l * l.transpose();
        for i in 0..4 {
            for j in 0..4 {
                assert!((rebuilt[(i, j)] - m.get(i + 1, j + 1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn log_spaced_grids_factor() {
        for alpha in [0.5, 1.2, 1.5, 1.8] {
            let grid = TimeGrid::logspace(0.01, 100.0, 50).unwrap();
            cov_matrix(HfbmParams::new(alpha).unwrap(), &grid).unwrap();
        }
    }

    #[test]
    fn sampled_moments() {
        let p = HfbmParams::new(1.5).unwrap();
        let grid = TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let m = 100_000;
        let paths = sample_hfbm(p, &grid, m, 2024).unwrap();
        let n = m as f64;
        let x: Vec<f64> = paths.iter().map(|p| p.values[1]).collect();
        let y: Vec<f64> = paths.iter().map(|p| p.values[2]).collect();
        assert!(paths.iter().all(|p| p.values[0] == 0.0));
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        assert!(mx.abs() <= 3.0 / n.sqrt());
        let vy = y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((vy - 2.0).abs() <= 3.0 * 2.0 * (2.0 / n).sqrt());
        let cxy = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
        let target = hfbm_cov(p, 1.0, 2.0).unwrap();
        // Var of the product of jointly normal variables: σx²σy² + σxy²
        let se = ((1.0 * 2.0 + target * target) / n).sqrt();
        assert!((cxy - target).abs() <= 3.0 * se, "{cxy} vs {target}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = HfbmParams::new(1.2).unwrap();
        let grid = TimeGrid::new(vec![0.5, 1.0]).unwrap();
        assert_eq!(sample_hfbm(p, &grid, 10, 1).unwrap(), sample_hfbm(p, &grid, 10, 1).unwrap());
        assert_ne!(sample_hfbm(p, &grid, 10, 1).unwrap(), sample_hfbm(p, &grid, 10, 2).unwrap());
    }

    #[test]
    fn property_suite_passes() {
        for alpha in [1.2, 1.5, 1.8] {
            let report = properties::check(HfbmParams::new(alpha).unwrap(), 500, 1e-10, 9).unwrap();
            assert!(report.all_passed(), "{report:?}");
        }
    }

    #[test]
    fn covariance_decays_logarithmically() {
        // Cov(B(1), B(t)) ≈ C_α (log t)^{(α-1)/2} for large t.
        let alpha = 1.6;
        let p = HfbmParams::new(alpha).unwrap();
        let ts = [1e4_f64, 1e6, 1e8];
        let xs: Vec<f64> = ts.iter().map(|t| t.ln().ln()).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| hfbm_cov(p, 1.0, t).unwrap().ln()).collect();
        let slope = (ys[2] - ys[0]) / (xs[2] - xs[0]);
        let want = 0.5 * (alpha - 1.0);
        assert!((slope - want).abs() <= 0.1 * want, "slope {slope}");
    }

    proptest! {
        #[test]
        fn scale_invariance(s in 0.01f64..10.0, t in 0.01f64..10.0, c in 0.1f64..50.0,
                            alpha in prop::sample::select(vec![0.4, 0.8, 1.2, 1.5, 1.8])) {
            let p = HfbmParams::new(alpha).unwrap();
            let lhs = hfbm_cov(p, c * s, c * t).unwrap();
            let rhs = c * hfbm_cov(p, s, t).unwrap();
            prop_assert!(((lhs - rhs) / rhs).abs() <= 1e-10);
        }

        #[test]
        fn increment_consistency(s in 0.01f64..10.0, d in 0.0f64..10.0) {
            let p = HfbmParams::new(1.5).unwrap();
            let t = s + d;
            let direct = increment_variance(p, s, t).unwrap();
            let combo = t + s - 2.0 * hfbm_cov(p, s, t).unwrap();
            prop_assert!((direct - combo).abs() <= 1e-12);
        }
    }
}
