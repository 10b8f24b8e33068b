//! Closed-form second moments of the logarithmic shot-noise process.
//!
//! All of them come from `Cov(S(s), S(t)) = λ ∫ g(s/u) g(t/u) K₂(u) du` with
//! the substitution `u = s e^{-w}`, which turns the integral into a Tricomi Ψ.

use crate::error::{domain, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{gamma, tricomi_psi, PsiArgs};

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 0.5 {
        Ok(())
    } else {
        Err(domain!("beta must lie in (0, 1/2), got {beta}"))
    }
}

fn ordered(s: f64, t: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && t > 0.0) || !(s.is_finite() && t.is_finite()) {
        return Err(domain!("covariance times must be positive, got ({s}, {t})"));
    }
    Ok(if s <= t { (s, t) } else { (t, s) })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain!("{name} must be positive, got {v}"))
    }
}

/// `Ψ(-β, -2β - shift; z)`, the only Ψ family these formulas need.
fn psi_neg(beta: f64, shift: f64, z: f64) -> Result<f64> {
    tricomi_psi(PsiArgs::new(-beta, -2.0 * beta - shift, z))
}

/// Constant conditional variance `K₂`:
/// `Γ(β+1) s K₂ λ Ψ(-β, -2β; log(t/s))`, which is `λ K₂ Γ(2β+1) t` on the diagonal.
pub fn cov_closed_form_independent(beta: f64, lambda: f64, k2: f64, s: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    positive("lambda", lambda)?;
    positive("K2", k2)?;
    let (s, t) = ordered(s, t)?;
    Ok(gamma(beta + 1.0)? * s * k2 * lambda * psi_neg(beta, 0.0, (t / s).ln())?)
}

/// `K₂(u) = K + u^{-γ}`.
pub fn cov_closed_form_powerlaw(beta: f64, lambda: f64, k: f64, gamma_exp: f64, s: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    positive("lambda", lambda)?;
    positive("K", k)?;
    if !(0.0..1.0).contains(&gamma_exp) {
        return Err(domain!("power-law exponent gamma must lie in [0, 1), got {gamma_exp}"));
    }
    let (s, t) = ordered(s, t)?;
    let l = (t / s).ln();
    let damp = 1.0 - gamma_exp;
    let bracket = k * psi_neg(beta, 0.0, l)?
        + damp.powf(-2.0 * beta - 1.0) * s.powf(-gamma_exp) * psi_neg(beta, 0.0, damp * l)?;
    Ok(gamma(beta + 1.0)? * s * lambda * bracket)
}

/// `K₂(u) = K - γ log u`, which must stay positive on `(0, s]`.
pub fn cov_closed_form_logdecay(beta: f64, lambda: f64, k: f64, gamma_exp: f64, s: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    positive("lambda", lambda)?;
    positive("K", k)?;
    if !(gamma_exp >= 0.0 && gamma_exp.is_finite()) {
        return Err(domain!("log-decay rate gamma must be non-negative, got {gamma_exp}"));
    }
    let (s, t) = ordered(s, t)?;
    // K₂ decreases in u, so positivity at s covers the whole support (0, s].
    let k2_s = k - gamma_exp * s.ln();
    if k2_s <= 0.0 {
        return Err(domain!("log-decay variance K - gamma log s = {k2_s} is not positive at s = {s}"));
    }
    let l = (t / s).ln();
    let mut v = gamma(beta + 1.0)? * lambda * s * k2_s * psi_neg(beta, 0.0, l)?;
    if gamma_exp > 0.0 {
        v += gamma(beta + 2.0)? * lambda * s * gamma_exp * psi_neg(beta, 1.0, l)?;
    }
    Ok(v)
}

/// `λ K₂ ∫₀^s (s-x)^β (t-x)^β dx` for the polynomial response, by quadrature.
pub fn cov_poly_numeric(beta: f64, lambda: f64, k2: f64, s: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    positive("lambda", lambda)?;
    positive("K2", k2)?;
    let (s, t) = ordered(s, t)?;
    // x = s - s v with v = w^{1/(1+β)} absorbs the v^β endpoint factor:
    // ∫₀^s (s-x)^β (t-x)^β dx = s^{2β+1}/(1+β) ∫₀¹ (t/s - 1 + v)^β dw.
    let gap = t / s - 1.0;
    let p = 1.0 / (1.0 + beta);
    let opts = QuadOptions {
        rel_tol: 1e-14,
        ..QuadOptions::default()
    };
    let inner = integrate(|w: f64| (gap + w.powf(p)).powf(beta), 0.0, 1.0, opts)?.value;
    Ok(lambda * k2 * s.powf(2.0 * beta + 1.0) * inner / (1.0 + beta))
}

/// `Var(X_β(t)) = λ K₂ t^{2β+1}/(2β+1)` for the polynomial response.
pub fn var_poly(beta: f64, lambda: f64, k2: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(t >= 0.0) {
        return Err(domain!("time must be non-negative, got {t}"));
    }
    Ok(lambda * k2 * t.powf(2.0 * beta + 1.0) / (2.0 * beta + 1.0))
}

/// `Corr(S(t), S(t+τ))` for constant conditional variance, a function of τ/t alone.
pub fn autocorrelation_closed_form(beta: f64, t: f64, tau: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(t > 0.0) || !(tau >= 0.0) {
        return Err(domain!("autocorrelation needs t > 0 and tau >= 0, got ({t}, {tau})"));
    }
    if tau == 0.0 {
        return Ok(1.0);
    }
    let r = 1.0 + tau / t;
    let c = gamma(beta + 1.0)? / gamma(2.0 * beta + 1.0)?;
    Ok(c * r.powf(-0.5) * psi_neg(beta, 0.0, r.ln())?)
}
