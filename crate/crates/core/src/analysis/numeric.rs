//! Direct quadrature of `λ ∫₀^∞ g(s, u) g(t, u) K₂(u) du` for any kernel and
//! variance profile. Serves as the reference for the closed forms and as the
//! covariance for profiles that have none.

use crate::error::{domain, Result};
use crate::kernels::{Kernel, KernelFamily};
use crate::noise::{NoiseModel, VarianceProfile};
use crate::quad::{integrate, integrate_panels, QuadOptions};

fn opts() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
        max_intervals: 4000,
    }
}

/// `Cov(S(s), S(t))` by adaptive quadrature.
pub fn cov_quadrature(kernel: &Kernel, noise: &NoiseModel, lambda: f64, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0 && lambda > 0.0) {
        return Err(domain!("cov_quadrature needs positive s, t, lambda"));
    }
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    // Only epochs u < s contribute; all of them must carry a valid variance.
    // K₂ is monotone for every profile, so checking the endpoint s suffices.
    if noise.k2_at_log(s.ln()) <= 0.0 {
        return Err(domain!("conditional variance not positive at s = {s}"));
    }
    let beta = kernel.beta();
    match kernel.family() {
        KernelFamily::Logarithmic => {
            // u = s e^{-w}
            let l = (t / s).ln();
            let ls = s.ln();
            let decay = match noise.profile() {
                VarianceProfile::PowerLaw { gamma, .. } => 1.0 - gamma,
                _ => 1.0,
            };
            // K₂(u) e^{-w}, with the power-law growth folded into the exponent
            // so that e^{γw} cannot overflow when γ is close to 1
            let damped = |w: f64| match noise.profile() {
                VarianceProfile::PowerLaw { k, gamma } => k * (-w).exp() + (-gamma * ls - decay * w).exp(),
                _ => noise.k2_at_log(ls - w) * (-w).exp(),
            };
            let integrand = |w: f64| w.powf(beta) * (l + w).powf(beta) * damped(w);
            let cutoff = (60.0 + 10.0 * (1.0 + l).ln()) / decay;
            Ok(lambda * s * integrate_panels(integrand, cutoff, opts())?)
        }
        KernelFamily::Polynomial => {
            let integrand = |u: f64| (s - u).powf(beta) * (t - u).powf(beta) * noise.k2_at_log(u.ln());
            let half = 0.5 * s;
            let v = integrate(integrand, 0.0, half, opts())?.value + integrate(integrand, half, s, opts())?.value;
            Ok(lambda * v)
        }
    }
}
