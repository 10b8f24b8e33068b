//! Gamma function, Kummer's Φ and Tricomi's Ψ for real arguments.
//!
//! Ψ is evaluated from its Laplace-type integral representation
//!
//! ```text
//! Ψ(a, b; z) = 1/Γ(a) ∫₀^∞ e^{-sz} s^{a-1} (1+s)^{b-a-1} ds,   a > 0, z > 0
//! ```
//!
//! with the Kummer transformation `Ψ(a,b;z) = z^{1-b} Ψ(a+1-b, 2-b; z)` used
//! to move a non-positive first parameter into the integrable range, and the
//! three-term recurrence in `a` when the transformation alone does not. At
//! `z = 0` and `b < 0` the limit value `Γ(1-b)/Γ(a-b+1)` is returned.
//!
//! The two-Φ series is exposed separately as [`tricomi_psi_series`] for
//! cross-checks on small `z`; it suffers from cancellation as `z` grows.

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_panels, QuadOptions};

const PHI_REL_TOL: f64 = 1e-16;
const PHI_MAX_TERMS: usize = 10_000;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(libm::lgamma(x))
}

/// `Γ(x)` for real `x` away from the poles at non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(domain!("gamma has a pole at {x}"));
    }
    Ok(libm::tgamma(x))
}

/// `1/Γ(x)`, which is entire: zero at the non-positive integers.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn is_integer(x: f64) -> bool {
    x == x.round()
}

/// Kummer's confluent hypergeometric function Φ(a, b; z) = ₁F₁(a; b; z) by
/// direct summation of its power series.
pub fn kummer_phi(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(domain!("kummer_phi: b = {b} is a non-positive integer"));
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(domain!("kummer_phi: non-finite argument ({a}, {b}, {z})"));
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    for l in 0..PHI_MAX_TERMS {
        let lf = l as f64;
        term *= (a + lf) / (b + lf) * z / (lf + 1.0);
        // Neumaier summation keeps the alternating case (z < 0) honest.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term == 0.0 {
            return Ok(sum + comp);
        }
        // Past the turning point the ratio |(a+l)z/((b+l)(l+1))| is below one
        // and shrinking, so the remaining tail is dominated by a geometric series.
        let ratio = ((a + lf + 1.0) / (b + lf + 1.0) * z / (lf + 2.0)).abs();
        if ratio < 0.5 && term.abs() <= PHI_REL_TOL * (sum + comp).abs() {
            return Ok(sum + comp);
        }
    }
    Err(Error::Accuracy(format!(
        "kummer_phi({a}, {b}, {z}) did not converge in {PHI_MAX_TERMS} terms"
    )))
}

/// Arguments of Tricomi's Ψ(a, b; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiArgs {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl PsiArgs {
    pub fn new(a: f64, b: f64, z: f64) -> Self {
        Self { a, b, z }
    }
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-14,
        abs_tol: 1e-300,
        max_intervals: 4000,
    }
}

/// Tricomi's confluent hypergeometric function Ψ(a, b; z) for `z ≥ 0`.
pub fn tricomi_psi(args: PsiArgs) -> Result<f64> {
    let PsiArgs { a, b, z } = args;
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(domain!("tricomi_psi: non-finite argument ({a}, {b}, {z})"));
    }
    if z < 0.0 {
        return Err(domain!("tricomi_psi requires z >= 0, got {z}"));
    }
    if z == 0.0 {
        return psi_at_zero(a, b);
    }
    if a > 0.0 {
        return psi_integral(a, b, z);
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    let shifted = a + 1.0 - b;
    if shifted > 0.0 {
        return Ok(z.powf(1.0 - b) * psi_integral(shifted, 2.0 - b, z)?);
    }
    psi_downward_recurrence(a, b, z)
}

/// Limit of Ψ(a, b; z) as z ↓ 0, which is finite only for b < 0 here.
fn psi_at_zero(a: f64, b: f64) -> Result<f64> {
    if b >= 0.0 {
        return Err(domain!("tricomi_psi at z = 0 requires b < 0, got b = {b}"));
    }
    // Γ(1-b) is finite and positive for b < 0.
    Ok(libm::tgamma(1.0 - b) * recip_gamma(a - b + 1.0))
}

/// Evaluates the integral representation for a > 0, z > 0.
fn psi_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    debug_assert!(a > 0.0 && z > 0.0);
    let c = b - a - 1.0;
    let opts = quad_opts();

    // Head [0, 1]. For a < 1 the factor s^{a-1} is singular; s = x^{1/a}
    // absorbs it: ∫₀¹ s^{a-1} h(s) ds = (1/a) ∫₀¹ h(x^{1/a}) dx.
    let head = if a < 1.0 {
        let p = 1.0 / a;
        integrate(
            |x| {
                let s = x.powf(p);
                (-s * z).exp() * (1.0 + s).powf(c)
            },
            0.0,
            1.0,
            opts,
        )?
        .value
            / a
    } else {
        integrate(
            |s| (-s * z).exp() * s.powf(a - 1.0) * (1.0 + s).powf(c),
            0.0,
            1.0,
            opts,
        )?
        .value
    };

    // Tail [1, ∞) shifted to start at 0. Past s·z ≈ 60 the exponential
    // factor is below e^{-60} of its value at the scale 1/z; the algebraic
    // factor can grow at most like s^{b-2}, which the margin absorbs.
    let cutoff = (60.0 + (b - 2.0).max(0.0) * (1.0 + 1.0 / z).ln()) / z;
    let tail = if cutoff > 1.0 {
        integrate_panels(
            |x| {
                let s = 1.0 + x;
                (-s * z).exp() * s.powf(a - 1.0) * (1.0 + s).powf(c)
            },
            cutoff - 1.0,
            opts,
        )?
    } else {
        0.0
    };

    let value = (head + tail) * recip_gamma(a);
    if !value.is_finite() {
        return Err(Error::Accuracy(format!("tricomi_psi({a}, {b}, {z}) overflowed")));
    }
    Ok(value)
}

/// Ψ for a < 0 with a + 1 - b ≤ 0, via
/// `Ψ(a-1,b;z) = -(b-2a-z) Ψ(a,b;z) - a(a-b+1) Ψ(a+1,b;z)`.
/// Ψ is the recessive solution as a → +∞, so recurring towards smaller `a`
/// is stable.
fn psi_downward_recurrence(a: f64, b: f64, z: f64) -> Result<f64> {
    let steps = (-a).floor() as usize + 1;
    let top = a + steps as f64;
    debug_assert!(top > 0.0);
    let mut upper = psi_integral(top + 1.0, b, z)?;
    let mut current = psi_integral(top, b, z)?;
    let mut ap = top;
    for _ in 0..steps {
        let lower = -(b - 2.0 * ap - z) * current - ap * (ap - b + 1.0) * upper;
        upper = current;
        current = lower;
        ap -= 1.0;
    }
    Ok(current)
}

/// Ψ from the two-Φ connection formula
/// `Γ(1-b)/Γ(a-b+1) Φ(a,b;z) + Γ(b-1)/Γ(a) z^{1-b} Φ(a-b+1, 2-b; z)`.
///
/// Only intended for `0 < z ≤ 2` and non-integer `b`.
pub fn tricomi_psi_series(args: PsiArgs) -> Result<f64> {
    let PsiArgs { a, b, z } = args;
    if is_integer(b) {
        return Err(domain!("series branch requires non-integer b, got {b}"));
    }
    if !(z > 0.0 && z <= 2.0) {
        return Err(domain!("series branch restricted to 0 < z <= 2, got {z}"));
    }
    let first = libm::tgamma(1.0 - b) * recip_gamma(a - b + 1.0) * kummer_phi(a, b, z)?;
    let second = libm::tgamma(b - 1.0)
        * recip_gamma(a)
        * z.powf(1.0 - b)
        * kummer_phi(a - b + 1.0, 2.0 - b, z)?;
    Ok(first + second)
}

/// d/dz Ψ(a, b; z) = -a Ψ(a+1, b+1; z).
pub fn tricomi_psi_derivative(args: PsiArgs) -> Result<f64> {
    let PsiArgs { a, b, z } = args;
    if a == 0.0 {
        if z < 0.0 {
            return Err(domain!("tricomi_psi requires z >= 0, got {z}"));
        }
        return Ok(0.0);
    }
    Ok(-a * tricomi_psi(PsiArgs::new(a + 1.0, b + 1.0, z))?)
}
