//! Expected and realized quadratic variation on uniform partitions.

use crate::analysis::closed_form::{cov_closed_form_independent, cov_poly_numeric, var_poly};
use crate::error::{domain, Error, Result};
use crate::kernels::{Kernel, KernelFamily};
use crate::noise::{NoiseModel, VarianceProfile};
use crate::shotnoise::SamplePath;
use crate::specfun::gamma;

fn constant_k2(noise: &NoiseModel) -> Result<f64> {
    match noise.profile() {
        VarianceProfile::Constant { k2 } => Ok(k2),
        _ => Err(Error::Unsupported(format!(
            "expected quadratic variation needs constant conditional variance, got {}",
            noise.id()
        ))),
    }
}

/// `E[(S(t) - S(s))²]` for `0 ≤ s < t`, from the closed-form second moments.
pub fn expected_increment_sq(kernel: &Kernel, lambda: f64, k2: f64, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0 && t > s) {
        return Err(domain!("increment needs 0 <= s < t, got ({s}, {t})"));
    }
    let beta = kernel.beta();
    match kernel.family() {
        KernelFamily::Logarithmic => {
            let var = |x: f64| gamma(2.0 * beta + 1.0).map(|g| lambda * k2 * g * x);
            if s == 0.0 {
                return var(t);
            }
            Ok(var(t)? + var(s)? - 2.0 * cov_closed_form_independent(beta, lambda, k2, s, t)?)
        }
        KernelFamily::Polynomial => {
            if s == 0.0 {
                return var_poly(beta, lambda, k2, t);
            }
            Ok(var_poly(beta, lambda, k2, t)? + var_poly(beta, lambda, k2, s)?
                - 2.0 * cov_poly_numeric(beta, lambda, k2, s, t)?)
        }
    }
}

/// `Σ_{k=1}^n E[(S(t_k) - S(t_{k-1}))²]` with `t_k = T k / n`.
pub fn expected_qv(kernel: &Kernel, lambda: f64, noise: &NoiseModel, horizon: f64, n: usize) -> Result<f64> {
    let k2 = constant_k2(noise)?;
    if !(horizon > 0.0) || n == 0 {
        return Err(domain!("expected_qv needs T > 0 and n >= 1"));
    }
    let h = horizon / n as f64;
    (1..=n).try_fold(0.0, |acc, k| {
        let s = if k == 1 { 0.0 } else { h * (k - 1) as f64 };
        let t = if k == n { horizon } else { h * k as f64 };
        Ok(acc + expected_increment_sq(kernel, lambda, k2, s, t)?)
    })
}

/// [`expected_qv`] for several `n` at once.
///
/// Uses the scaling of the increments in the step size (index 1 for the
/// logarithmic kernel, `2β + 1` for the polynomial one) so the unit-step
/// increments are computed only once up to `max(ns)`.
pub fn expected_qv_sweep(kernel: &Kernel, lambda: f64, noise: &NoiseModel, horizon: f64, ns: &[usize]) -> Result<Vec<f64>> {
    let k2 = constant_k2(noise)?;
    if !(horizon > 0.0) || ns.contains(&0) {
        return Err(domain!("expected_qv needs T > 0 and n >= 1"));
    }
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let unit: Vec<f64> = (1..=n_max)
        .map(|k| expected_increment_sq(kernel, lambda, k2, (k - 1) as f64, k as f64))
        .collect::<Result<_>>()?;
    let mut prefix = Vec::with_capacity(n_max + 1);
    prefix.push(0.0);
    for u in &unit {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + u);
    }
    let index = match kernel.family() {
        KernelFamily::Logarithmic => 1.0,
        KernelFamily::Polynomial => 2.0 * kernel.beta() + 1.0,
    };
    Ok(ns
        .iter()
        .map(|&n| (horizon / n as f64).powf(index) * prefix[n])
        .collect())
}

/// Realized quadratic variation `Σ (x_k - x_{k-1})²` of a path on a uniform grid.
pub fn empirical_qv(path: &SamplePath) -> Result<f64> {
    if !path.grid.is_uniform() {
        return Err(Error::Grid("realized quadratic variation needs a uniform grid".into()));
    }
    Ok(path.values.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain!("slope fit needs two or more matching points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(domain!("log-log slope needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use crate::quad::{integrate, QuadOptions};
    use crate::shotnoise::{simulate_ensemble, SimConfig};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn single_step_is_the_variance() {
        let k = Kernel::logarithmic(0.25).unwrap();
        let noise = NoiseModel::constant(2.0).unwrap();
        let v = expected_qv(&k, 1.5, &noise, 3.0, 1).unwrap();
        assert!(rel(v, 1.5 * 2.0 * gamma(1.5).unwrap() * 3.0) < 1e-14);
    }

    #[test]
    fn rejects_non_constant_variance() {
        let k = Kernel::logarithmic(0.25).unwrap();
        let noise = NoiseModel::gaussian(VarianceProfile::PowerLaw { k: 1.0, gamma: 0.5 }).unwrap();
        assert!(matches!(expected_qv(&k, 1.0, &noise, 1.0, 4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sweep_matches_direct_sum() {
        let noise = NoiseModel::constant(1.0).unwrap();
        for k in [Kernel::logarithmic(0.3).unwrap(), Kernel::polynomial(0.3).unwrap()] {
            let sweep = expected_qv_sweep(&k, 1.0, &noise, 2.0, &[1, 8, 64]).unwrap();
            for (n, v) in [1, 8, 64].iter().zip(&sweep) {
                let direct = expected_qv(&k, 1.0, &noise, 2.0, *n).unwrap();
                assert!(rel(*v, direct) < 1e-9, "{:?} n={n}: {v} vs {direct}", k.family());
            }
        }
    }

    #[test]
    fn log_increment_matches_direct_integral() {
        // E[ΔS²]/λK₂ = ∫₀^s (log^β(t/u) − log^β(s/u))² du + ∫_s^t log^{2β}(t/u) du
        let beta = 0.25_f64;
        let (s, t) = (3.0_f64, 3.1_f64);
        let opts = QuadOptions::default();
        let a = integrate(|u: f64| ((t / u).ln().powf(beta) - (s / u).ln().powf(beta)).powi(2), 0.0, s, opts)
            .unwrap()
            .value;
        let b = integrate(|u: f64| (t / u).ln().powf(2.0 * beta), s, t, opts).unwrap().value;
        let k = Kernel::logarithmic(beta).unwrap();
        let v = expected_increment_sq(&k, 1.0, 1.0, s, t).unwrap();
        assert!(rel(v, a + b) < 1e-7, "{v} vs {}", a + b);
    }

    #[test]
    fn log_kernel_qv_decreases() {
        let k = Kernel::logarithmic(0.25).unwrap();
        let noise = NoiseModel::constant(1.0).unwrap();
        let ns = [4, 8, 16, 32, 64, 128];
        let v = expected_qv_sweep(&k, 1.0, &noise, 1.0, &ns).unwrap();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }

    #[test]
    fn poly_kernel_qv_vanishes_too() {
        // Increments of (t - u)₊^β for β < 1/2 scale as h^{2β+1} with summable
        // unit-step terms, so the expected sum decays like n^{-2β}.
        let beta = 0.25;
        let k = Kernel::polynomial(beta).unwrap();
        let noise = NoiseModel::constant(1.0).unwrap();
        let ns = [256, 512, 1024, 2048];
        let v = expected_qv_sweep(&k, 1.0, &noise, 1.0, &ns).unwrap();
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let slope = log_log_slope(&xs, &v).unwrap();
        assert!((slope + 2.0 * beta).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn realized_matches_expected() {
        let beta = 0.25;
        let kernel = Kernel::logarithmic(beta).unwrap();
        let noise = NoiseModel::constant(1.0).unwrap();
        let (t_end, n, lambda) = (2.0, 64, 5.0);
        let cfg = SimConfig::new(kernel, noise, lambda, TimeGrid::uniform(t_end, n).unwrap(), 17)
            .unwrap()
            .with_ensemble_size(20_000)
            .unwrap();
        let paths = simulate_ensemble(&cfg).unwrap();
        let qvs: Vec<f64> = paths.iter().map(|p| empirical_qv(p).unwrap()).collect();
        let want = expected_qv(&kernel, lambda, &noise, t_end, n).unwrap();
        let mc = crate::analysis::estimators::sample_mean("qv", &qvs).unwrap().with_target(want);
        assert!(mc.within(3.0), "{mc:?}");
    }

    #[test]
    fn qv_requires_uniform_grid() {
        let p = SamplePath {
            grid: TimeGrid::new(vec![0.0, 1.0, 3.0]).unwrap(),
            values: vec![0.0, 1.0, 1.0],
            meta: crate::shotnoise::PathMeta {
                kernel: None,
                noise: None,
                seed: 0,
                path_index: 0,
                scale: None,
            },
        };
        assert!(empirical_qv(&p).is_err());
        let flat = SamplePath {
            grid: TimeGrid::uniform(1.0, 2).unwrap(),
            values: vec![2.0; 3],
            ..p
        };
        assert_eq!(empirical_qv(&flat).unwrap(), 0.0);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.7)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 0.7).abs() < 1e-12);
    }
}
