//! Poisson shot-noise paths on fixed time grids.
//!
//! A path is `S(t) = Σ_j g(t, T_j) R_j` over homogeneous Poisson epochs `T_j`
//! with marks `R_j` drawn from a [`NoiseModel`], evaluated by direct
//! summation. The kernel vanishes for `T_j ≥ t`, so only the sorted prefix of
//! epochs before each grid time is visited.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::kernels::{Kernel, KernelFamily};
use crate::noise::NoiseModel;
use crate::rng::{path_rng, PathRng};
use crate::specfun::gamma;

/// Poisson epochs on `(0, horizon]` with their marks.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSet {
    lambda: f64,
    horizon: f64,
    epochs: Vec<f64>,
    marks: Vec<f64>,
}

impl ArrivalSet {
    /// Builds an arrival set from explicit epochs and marks (`marks` may be empty).
    pub fn from_parts(lambda: f64, horizon: f64, epochs: Vec<f64>, marks: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0 && horizon > 0.0) {
            return Err(domain!("arrival rate and horizon must be positive"));
        }
        if epochs.iter().any(|&t| !(t > 0.0 && t <= horizon)) {
            return Err(domain!("epochs must lie in (0, {horizon}]"));
        }
        if epochs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain!("epochs must be strictly increasing"));
        }
        if !marks.is_empty() && marks.len() != epochs.len() {
            return Err(domain!("{} marks for {} epochs", marks.len(), epochs.len()));
        }
        Ok(Self {
            lambda,
            horizon,
            epochs,
            marks,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn is_marked(&self) -> bool {
        self.marks.len() == self.epochs.len()
    }

    /// Draws `marks[j]` from the noise law at `epochs[j]`.
    pub fn attach_marks<R: Rng + ?Sized>(mut self, noise: &NoiseModel, rng: &mut R) -> Result<Self> {
        if !self.marks.is_empty() {
            return Err(domain!("arrival set already carries marks"));
        }
        self.marks = self
            .epochs
            .iter()
            .map(|&u| noise.sample(u, rng))
            .collect::<Result<_>>()?;
        Ok(self)
    }
}

/// Homogeneous Poisson epochs of rate `lambda` on `(0, horizon]`.
pub fn simulate_arrivals<R: Rng + ?Sized>(lambda: f64, horizon: f64, rng: &mut R) -> Result<ArrivalSet> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain!("arrival rate must be positive, got {lambda}"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain!("horizon must be positive, got {horizon}"));
    }
    let mut epochs = Vec::with_capacity((lambda * horizon * 1.1) as usize + 8);
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        t += gap / lambda;
        if t > horizon {
            break;
        }
        // A zero gap would repeat an epoch; it has probability ~2^-53.
        if epochs.last().is_some_and(|&last| t <= last) {
            continue;
        }
        epochs.push(t);
    }
    Ok(ArrivalSet {
        lambda,
        horizon,
        epochs,
        marks: Vec::new(),
    })
}

/// Provenance of a simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub kernel: Option<Kernel>,
    pub noise: Option<String>,
    pub seed: u64,
    pub path_index: u64,
    pub scale: Option<f64>,
}

/// Values of one realization on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub meta: PathMeta,
}

impl SamplePath {
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.grid
            .position(t)
            .map(|i| self.values[i])
            .ok_or_else(|| Error::Grid(format!("time {t} is not on the path grid")))
    }
}

/// Evaluates `Σ_j g(t, T_j) R_j` at every grid time.
pub fn evaluate_path(arrivals: &ArrivalSet, kernel: &Kernel, grid: &TimeGrid) -> Result<Vec<f64>> {
    evaluate_at(arrivals, kernel, grid.times())
}

fn evaluate_at(arrivals: &ArrivalSet, kernel: &Kernel, times: &[f64]) -> Result<Vec<f64>> {
    if !arrivals.is_marked() {
        return Err(domain!("arrival set has no marks attached"));
    }
    let horizon = arrivals.horizon * (1.0 + 1e-12);
    if let Some(t) = times.iter().find(|&&t| t > horizon) {
        return Err(domain!("grid time {t} lies beyond the arrival horizon {}", arrivals.horizon));
    }
    let epochs = &arrivals.epochs;
    let marks = &arrivals.marks;
    let log_epochs: Vec<f64> = match kernel.family() {
        KernelFamily::Logarithmic => epochs.iter().map(|u| u.ln()).collect(),
        KernelFamily::Polynomial => Vec::new(),
    };
    let values = times
        .iter()
        .map(|&t| {
            if t <= 0.0 {
                return 0.0;
            }
            let active = epochs.partition_point(|&u| u < t);
            match kernel.family() {
                KernelFamily::Logarithmic => {
                    let lt = t.ln();
                    log_epochs[..active]
                        .iter()
                        .zip(&marks[..active])
                        .map(|(lu, r)| kernel.positive_part_pow(lt - lu) * r)
                        .sum()
                }
                KernelFamily::Polynomial => epochs[..active]
                    .iter()
                    .zip(&marks[..active])
                    .map(|(u, r)| kernel.positive_part_pow(t - u) * r)
                    .sum(),
            }
        })
        .collect();
    Ok(values)
}

/// Normalization of the scaled process `S(ct)/√(c K λ Γ(α))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub alpha: f64,
    pub c: f64,
    /// Limit `K = lim K₂(u)` of the conditional variance.
    pub k: f64,
}

impl Scaling {
    pub fn new(alpha: f64, c: f64, k: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(domain!("alpha must lie in (1, 2), got {alpha}"));
        }
        if !(c >= 1.0 && c.is_finite()) {
            return Err(domain!("scale c must be >= 1, got {c}"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(domain!("limit variance K must be positive, got {k}"));
        }
        Ok(Self { alpha, c, k })
    }

    /// Kernel exponent tied to `alpha`.
    pub fn beta(&self) -> f64 {
        0.5 * (self.alpha - 1.0)
    }

    fn divisor(&self, lambda: f64) -> f64 {
        (self.c * self.k * lambda * gamma(self.alpha).expect("alpha in (1, 2)")).sqrt()
    }
}

/// Everything needed to simulate an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub kernel: Kernel,
    pub noise: NoiseModel,
    pub lambda: f64,
    pub grid: TimeGrid,
    pub seed: u64,
    pub ensemble_size: usize,
    pub scaling: Option<Scaling>,
}

impl SimConfig {
    pub fn new(kernel: Kernel, noise: NoiseModel, lambda: f64, grid: TimeGrid, seed: u64) -> Result<Self> {
        let config = Self {
            kernel,
            noise,
            lambda,
            grid,
            seed,
            ensemble_size: 1,
            scaling: None,
        };
        config.validate()?;
        Ok(config)
    }

    /// Configuration for `Ŝ_{α,c}`: log kernel with `β = (α-1)/2` and the
    /// normalization constant taken from the noise model's limit variance.
    pub fn scaled(alpha: f64, c: f64, noise: NoiseModel, lambda: f64, grid: TimeGrid, seed: u64) -> Result<Self> {
        let k = noise
            .limit_k2()
            .ok_or_else(|| domain!("noise model {} has no positive limit variance", noise.id()))?;
        let scaling = Scaling::new(alpha, c, k)?;
        let kernel = Kernel::logarithmic(scaling.beta())?;
        Self::new(kernel, noise, lambda, grid, seed)?.with_scaling(scaling)
    }

    pub fn with_ensemble_size(mut self, m: usize) -> Result<Self> {
        self.ensemble_size = m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Result<Self> {
        self.scaling = Some(scaling);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(domain!("arrival rate must be positive, got {}", self.lambda));
        }
        if self.ensemble_size == 0 {
            return Err(domain!("ensemble size must be at least 1"));
        }
        if let Some(s) = &self.scaling {
            Scaling::new(s.alpha, s.c, s.k)?;
            if self.kernel.family() != KernelFamily::Logarithmic {
                return Err(domain!("the scaled process uses the logarithmic kernel"));
            }
            if (self.kernel.beta() - s.beta()).abs() > 1e-12 {
                return Err(domain!(
                    "kernel beta {} does not equal (alpha - 1)/2 = {}",
                    self.kernel.beta(),
                    s.beta()
                ));
            }
        }
        // Grid times are evaluated at c·t; all of them must be admissible epochs.
        let c = self.scaling.map_or(1.0, |s| s.c);
        let horizon = c * self.grid.last();
        if horizon > 0.0 {
            self.noise.k2(horizon)?;
        }
        Ok(())
    }

    fn horizon(&self) -> f64 {
        self.scaling.map_or(1.0, |s| s.c) * self.grid.last()
    }

    fn meta(&self, kernel: Kernel, index: u64) -> PathMeta {
        PathMeta {
            kernel: Some(kernel),
            noise: Some(self.noise.id()),
            seed: self.seed,
            path_index: index,
            scale: self.scaling.map(|s| s.c),
        }
    }
}

/// Simulates one path per kernel from a single draw of arrivals and marks.
///
/// With several kernels the paths differ only through the response function.
pub fn simulate_kernels<R: Rng + ?Sized>(
    config: &SimConfig,
    kernels: &[Kernel],
    index: u64,
    rng: &mut R,
) -> Result<Vec<SamplePath>> {
    let horizon = config.horizon();
    let grid = config.grid.times();
    if horizon <= 0.0 {
        // Grid is {0}: the empty sum.
        return Ok(kernels
            .iter()
            .map(|&k| SamplePath {
                grid: config.grid.clone(),
                values: vec![0.0; grid.len()],
                meta: config.meta(k, index),
            })
            .collect());
    }
    let arrivals = simulate_arrivals(config.lambda, horizon, rng)?.attach_marks(&config.noise, rng)?;
    let (times, divisor) = match config.scaling {
        Some(s) => (
            grid.iter().map(|t| s.c * t).collect::<Vec<_>>(),
            s.divisor(config.lambda),
        ),
        None => (grid.to_vec(), 1.0),
    };
    kernels
        .iter()
        .map(|&kernel| {
            let mut values = evaluate_at(&arrivals, &kernel, &times)?;
            if divisor != 1.0 {
                values.iter_mut().for_each(|v| *v /= divisor);
            }
            Ok(SamplePath {
                grid: config.grid.clone(),
                values,
                meta: config.meta(kernel, index),
            })
        })
        .collect()
}

/// Simulates a single path of the configured process.
pub fn simulate<R: Rng + ?Sized>(config: &SimConfig, index: u64, rng: &mut R) -> Result<SamplePath> {
    Ok(simulate_kernels(config, &[config.kernel], index, rng)?.remove(0))
}

/// Simulates `Ŝ_{α,c}` on the configured grid; the config must carry a scaling.
pub fn simulate_scaled<R: Rng + ?Sized>(config: &SimConfig, index: u64, rng: &mut R) -> Result<SamplePath> {
    if config.scaling.is_none() {
        return Err(domain!("simulate_scaled needs a configuration with alpha and scale"));
    }
    simulate(config, index, rng)
}

/// `ensemble_size` independent paths; path `m` uses the stream `(seed, m)`.
pub fn simulate_ensemble(config: &SimConfig) -> Result<Vec<SamplePath>> {
    config.validate()?;
    (0..config.ensemble_size as u64)
        .into_par_iter()
        .map(|m| simulate(config, m, &mut path_rng(config.seed, m)))
        .collect()
}

/// Like [`simulate_ensemble`] but returning, for every path index, one path
/// per kernel computed from shared arrivals and marks.
pub fn simulate_ensemble_kernels(config: &SimConfig, kernels: &[Kernel]) -> Result<Vec<Vec<SamplePath>>> {
    config.validate()?;
    (0..config.ensemble_size as u64)
        .into_par_iter()
        .map(|m| simulate_kernels(config, kernels, m, &mut path_rng(config.seed, m)))
        .collect()
}

/// Draws a marked arrival set with the stream of path `index`, as the simulators do.
pub fn draw_arrivals(config: &SimConfig, index: u64) -> Result<ArrivalSet> {
    let mut rng: PathRng = path_rng(config.seed, index);
    simulate_arrivals(config.lambda, config.horizon(), &mut rng)?.attach_marks(&config.noise, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn marked(epochs: Vec<f64>, marks: Vec<f64>, horizon: f64) -> ArrivalSet {
        ArrivalSet::from_parts(1.0, horizon, epochs, marks).unwrap()
    }

    #[test]
    fn arrival_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(simulate_arrivals(1.0, 0.0, &mut rng).is_err());
        assert!(simulate_arrivals(0.0, 1.0, &mut rng).is_err());
        assert!(ArrivalSet::from_parts(1.0, 1.0, vec![0.5, 0.5], vec![]).is_err());
        assert!(ArrivalSet::from_parts(1.0, 1.0, vec![1.5], vec![]).is_err());
        assert!(ArrivalSet::from_parts(1.0, 1.0, vec![0.5], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn arrival_counts_and_gaps() {
        let (lambda, horizon, m) = (2.0, 5.0, 20_000);
        let mut total = 0usize;
        for i in 0..m {
            let a = simulate_arrivals(lambda, horizon, &mut path_rng(99, i)).unwrap();
            assert!(a.epochs().windows(2).all(|w| w[0] < w[1]));
            assert!(a.epochs().iter().all(|&t| t > 0.0 && t <= horizon));
            total += a.epochs().len();
        }
        let mean = total as f64 / m as f64;
        let expect = lambda * horizon;
        assert!((mean - expect).abs() <= 3.0 * (expect / m as f64).sqrt(), "{mean}");

        let a = simulate_arrivals(3.0, 40_000.0, &mut path_rng(5, 0)).unwrap();
        let gaps: Vec<f64> = a.epochs().windows(2).map(|w| w[1] - w[0]).take(100_000).collect();
        let n = gaps.len() as f64;
        let gm = gaps.iter().sum::<f64>() / n;
        // exponential(λ): sd = 1/λ
        assert!((gm - 1.0 / 3.0).abs() <= 3.0 * (1.0 / 3.0) / n.sqrt(), "{gm}");
    }

    #[test]
    fn marks_follow_epochs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let empty = ArrivalSet::from_parts(1.0, 3.0, vec![], vec![]).unwrap();
        let empty = empty.attach_marks(&NoiseModel::constant(1.0).unwrap(), &mut rng).unwrap();
        assert!(empty.marks().is_empty() && empty.is_marked());

        let noise = NoiseModel::gaussian(crate::noise::VarianceProfile::LogDecay {
            k: 3.0,
            gamma: 1.0,
            horizon: 20.0,
        })
        .unwrap();
        let late = ArrivalSet::from_parts(1.0, 30.0, vec![1.0, 25.0], vec![]).unwrap();
        assert!(late.attach_marks(&noise, &mut rng).is_err());
    }

    #[test]
    fn path_values_by_hand() {
        let kernel = Kernel::logarithmic(0.25).unwrap();
        let e = std::f64::consts::E;
        let one = marked(vec![1.0], vec![2.0], 10.0);
        let grid = TimeGrid::new(vec![0.0, 0.5, 1.0, e]).unwrap();
        let v = evaluate_path(&one, &kernel, &grid).unwrap();
        assert_eq!(&v[..3], &[0.0, 0.0, 0.0]);
        assert!((v[3] - 2.0).abs() < 1e-15);

        // three arrivals, direct scalar evaluation of the defining sum
        let epochs = vec![0.3, 1.1, 2.5];
        let marks = vec![0.7, -1.3, 2.2];
        let set = marked(epochs.clone(), marks.clone(), 4.0);
        let times = vec![0.2, 0.3, 1.0, 2.0, 2.5, 3.9];
        let grid = TimeGrid::new(times.clone()).unwrap();
        for beta in [0.1, 0.3] {
            for kernel in [Kernel::logarithmic(beta).unwrap(), Kernel::polynomial(beta).unwrap()] {
                let got = evaluate_path(&set, &kernel, &grid).unwrap();
                for (i, &t) in times.iter().enumerate() {
                    let mut want = 0.0;
                    for j in 0..3 {
                        if epochs[j] < t {
                            let gap = match kernel.family() {
                                KernelFamily::Logarithmic => (t / epochs[j]).ln(),
                                KernelFamily::Polynomial => t - epochs[j],
                            };
                            want += gap.powf(beta) * marks[j];
                        }
                    }
                    assert!((got[i] - want).abs() <= 1e-14 * want.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn path_errors() {
        let kernel = Kernel::logarithmic(0.25).unwrap();
        let set = marked(vec![1.0], vec![1.0], 2.0);
        assert!(evaluate_path(&set, &kernel, &TimeGrid::new(vec![1.0, 3.0]).unwrap()).is_err());
        let unmarked = ArrivalSet::from_parts(1.0, 2.0, vec![1.0], vec![]).unwrap();
        assert!(evaluate_path(&unmarked, &kernel, &TimeGrid::new(vec![1.5]).unwrap()).is_err());
    }

    fn config(seed: u64, m: usize) -> SimConfig {
        SimConfig::new(
            Kernel::logarithmic(0.25).unwrap(),
            NoiseModel::constant(1.0).unwrap(),
            1.0,
            TimeGrid::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
            seed,
        )
        .unwrap()
        .with_ensemble_size(m)
        .unwrap()
    }

    #[test]
    fn ensemble_is_deterministic() {
        let a = simulate_ensemble(&config(42, 64)).unwrap();
        let b = simulate_ensemble(&config(42, 64)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.values[0] == 0.0));
        let single = simulate_ensemble(&config(42, 1)).unwrap();
        let direct = simulate(&config(42, 1), 0, &mut path_rng(42, 0)).unwrap();
        assert_eq!(single[0], direct);
        assert_eq!(single[0], a[0]);
    }

    #[test]
    fn ensemble_independent_of_thread_count() {
        let cfg = config(8, 32);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let threaded = pool.install(|| simulate_ensemble(&cfg)).unwrap();
        let serial: Vec<_> = (0..32).map(|m| simulate(&cfg, m, &mut path_rng(8, m)).unwrap()).collect();
        assert_eq!(threaded, serial);
    }

    #[test]
    fn compare_mode_shares_arrivals() {
        let cfg = config(3, 1);
        let kernels = [Kernel::logarithmic(0.3).unwrap(), Kernel::polynomial(0.3).unwrap()];
        let pair = simulate_kernels(&cfg, &kernels, 0, &mut path_rng(3, 0)).unwrap();
        let arrivals = draw_arrivals(&cfg, 0).unwrap();
        for (path, kernel) in pair.iter().zip(&kernels) {
            assert_eq!(path.values, evaluate_path(&arrivals, kernel, &cfg.grid).unwrap());
        }
    }

    #[test]
    fn scaled_config_validation() {
        let noise = NoiseModel::constant(1.0).unwrap();
        let grid = TimeGrid::new(vec![0.5, 1.0]).unwrap();
        assert!(SimConfig::scaled(2.5, 10.0, noise, 1.0, grid.clone(), 1).is_err());
        assert!(SimConfig::scaled(1.5, 0.5, noise, 1.0, grid.clone(), 1).is_err());
        let cfg = SimConfig::scaled(1.5, 10.0, noise, 1.0, grid.clone(), 1).unwrap();
        assert_eq!(cfg.kernel.beta(), 0.25);
        let wrong = SimConfig::new(Kernel::logarithmic(0.3).unwrap(), noise, 1.0, grid, 1).unwrap();
        assert!(wrong.with_scaling(Scaling::new(1.5, 10.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn unit_scale_normalization() {
        let noise = NoiseModel::constant(1.0).unwrap();
        let grid = TimeGrid::new(vec![0.5, 1.0, 3.0]).unwrap();
        let alpha = 1.4;
        let scaled = SimConfig::scaled(alpha, 1.0, noise, 1.0, grid.clone(), 77).unwrap();
        let plain = SimConfig::new(scaled.kernel, noise, 1.0, grid, 77).unwrap();
        let a = simulate_scaled(&scaled, 0, &mut path_rng(77, 0)).unwrap();
        let b = simulate(&plain, 0, &mut path_rng(77, 0)).unwrap();
        let g = gamma(alpha).unwrap().sqrt();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y / g).abs() <= 1e-14 * y.abs().max(1.0));
        }
        assert!(simulate_scaled(&plain, 0, &mut path_rng(1, 0)).is_err());
    }
}
