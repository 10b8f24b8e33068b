//! Conditional laws of the shot marks.
//!
//! A mark attached to an arrival at time `u` is centered with conditional
//! variance `K₂(u)` given by a [`VarianceProfile`], and its shape is fixed by a
//! [`MarkLaw`].

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Time profile `u ↦ K₂(u)` of the conditional variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum VarianceProfile {
    /// `K₂(u) = k2`: marks independent of their epochs.
    Constant { k2: f64 },
    /// `K₂(u) = k + u^{-γ}`, unbounded as u ↓ 0.
    PowerLaw { k: f64, gamma: f64 },
    /// `K₂(u) = k + (1 + u)^{-γ}`, the bounded counterpart of `PowerLaw`.
    ShiftedPowerLaw { k: f64, gamma: f64 },
    /// `K₂(u) = k - γ log u`, positive only up to `e^{k/γ}`; `horizon` bounds
    /// the epochs it will be asked about.
    LogDecay { k: f64, gamma: f64, horizon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkLaw {
    /// `N(0, K₂(u))`.
    Gaussian,
    /// `±√K₂(u)` with probability ½ each.
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    profile: VarianceProfile,
    law: MarkLaw,
}

impl NoiseModel {
    pub fn new(profile: VarianceProfile, law: MarkLaw) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(domain!("noise parameter {name} must be positive, got {v}"))
            }
        };
        match profile {
            VarianceProfile::Constant { k2 } => positive("K2", k2)?,
            VarianceProfile::PowerLaw { k, gamma } | VarianceProfile::ShiftedPowerLaw { k, gamma } => {
                positive("K", k)?;
                if !(0.0..1.0).contains(&gamma) {
                    return Err(domain!("power-law exponent gamma must lie in [0, 1), got {gamma}"));
                }
            }
            VarianceProfile::LogDecay { k, gamma, horizon } => {
                positive("K", k)?;
                positive("gamma", gamma)?;
                positive("horizon", horizon)?;
                if k - gamma * horizon.ln() <= 0.0 {
                    return Err(domain!(
                        "log-decay variance K - gamma log u turns non-positive before the horizon \
                         {horizon} (it vanishes at u = {:.6})",
                        (k / gamma).exp()
                    ));
                }
            }
        }
        Ok(Self { profile, law })
    }

    pub fn gaussian(profile: VarianceProfile) -> Result<Self> {
        Self::new(profile, MarkLaw::Gaussian)
    }

    pub fn constant(k2: f64) -> Result<Self> {
        Self::gaussian(VarianceProfile::Constant { k2 })
    }

    pub fn profile(&self) -> VarianceProfile {
        self.profile
    }

    pub fn law(&self) -> MarkLaw {
        self.law
    }

    /// Short identifier used in path metadata and output headers.
    pub fn id(&self) -> String {
        let law = match self.law {
            MarkLaw::Gaussian => "gaussian",
            MarkLaw::Rademacher => "rademacher",
        };
        match self.profile {
            VarianceProfile::Constant { k2 } => format!("{law}-const:K2={k2}"),
            VarianceProfile::PowerLaw { k, gamma } => format!("{law}-powerlaw:K={k},gamma={gamma}"),
            VarianceProfile::ShiftedPowerLaw { k, gamma } => {
                format!("{law}-shifted:K={k},gamma={gamma}")
            }
            VarianceProfile::LogDecay { k, gamma, horizon } => {
                format!("{law}-logdecay:K={k},gamma={gamma},horizon={horizon}")
            }
        }
    }

    /// Conditional variance `K₂(u)`.
    pub fn k2(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(domain!("noise epoch must be positive, got {u}"));
        }
        match self.profile {
            VarianceProfile::Constant { k2 } => Ok(k2),
            VarianceProfile::PowerLaw { k, gamma } => Ok(k + u.powf(-gamma)),
            VarianceProfile::ShiftedPowerLaw { k, gamma } => Ok(k + (1.0 + u).powf(-gamma)),
            VarianceProfile::LogDecay { k, gamma, horizon } => {
                let v = k - gamma * u.ln();
                if u > horizon || v <= 0.0 {
                    return Err(domain!(
                        "log-decay variance undefined at u = {u} (horizon {horizon}, K2 = {v})"
                    ));
                }
                Ok(v)
            }
        }
    }

    /// `K₂` as a function of `log u`, without domain checks. Lets quadratures
    /// reach epochs far below the smallest positive double.
    pub(crate) fn k2_at_log(&self, log_u: f64) -> f64 {
        match self.profile {
            VarianceProfile::Constant { k2 } => k2,
            VarianceProfile::PowerLaw { k, gamma } => k + (-gamma * log_u).exp(),
            VarianceProfile::ShiftedPowerLaw { k, gamma } => k + (1.0 + log_u.exp()).powf(-gamma),
            VarianceProfile::LogDecay { k, gamma, .. } => k - gamma * log_u,
        }
    }

    /// Conditional fourth moment `K₄(u)`.
    pub fn k4(&self, u: f64) -> Result<f64> {
        let v = self.k2(u)?;
        Ok(match self.law {
            MarkLaw::Gaussian => 3.0 * v * v,
            MarkLaw::Rademacher => v * v,
        })
    }

    /// Bound on `K₄(u)/K₂(u)²` over all epochs.
    pub fn kurtosis_bound(&self) -> f64 {
        match self.law {
            MarkLaw::Gaussian => 3.0,
            MarkLaw::Rademacher => 1.0,
        }
    }

    /// `lim_{u→∞} K₂(u)` when it exists and is positive.
    pub fn limit_k2(&self) -> Option<f64> {
        match self.profile {
            VarianceProfile::Constant { k2 } => Some(k2),
            VarianceProfile::PowerLaw { k, .. } | VarianceProfile::ShiftedPowerLaw { k, .. } => Some(k),
            VarianceProfile::LogDecay { .. } => None,
        }
    }

    /// Whether `K₂` is bounded on `(0, ∞)`.
    pub fn is_bounded(&self) -> bool {
        match self.profile {
            VarianceProfile::Constant { .. } | VarianceProfile::ShiftedPowerLaw { .. } => true,
            VarianceProfile::PowerLaw { gamma, .. } => gamma == 0.0,
            VarianceProfile::LogDecay { .. } => false,
        }
    }

    /// Draws a mark for an arrival at `u`.
    pub fn sample<R: Rng + ?Sized>(&self, u: f64, rng: &mut R) -> Result<f64> {
        let sd = self.k2(u)?.sqrt();
        Ok(match self.law {
            MarkLaw::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                sd * z
            }
            MarkLaw::Rademacher => {
                if rng.random::<bool>() {
                    sd
                } else {
                    -sd
                }
            }
        })
    }
}
