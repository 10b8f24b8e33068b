//! Shot-noise processes with a logarithmic response function.
//!
//! The crate simulates
//!
//! ```text
//! S_β(t) = Σ_j (log t − log T_j)₊^β R_j
//! ```
//!
//! over Poisson epochs `T_j` with centered marks `R_j`, together with the
//! power-response comparator `X_β(t) = Σ_j (t − T_j)₊^β R_j`, and provides
//! the closed-form covariances, quadratic-variation computations, and the
//! Hadamard fractional Brownian motion that `S(ct)/√c` approaches as `c → ∞`.
//!
//! Modules:
//! - [`specfun`]: Γ, Kummer Φ, Tricomi Ψ.
//! - [`kernels`], [`noise`]: response functions and mark laws.
//! - [`shotnoise`]: arrivals, marks and path evaluation; seeded ensembles.
//! - [`hfbm`]: limiting covariance, increment variance, exact sampling.
//! - [`analysis`]: closed forms, estimators, quadratic variation, limit diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod grid;
pub mod hfbm;
pub mod kernels;
pub mod noise;
pub mod quad;
pub mod rng;
pub mod shotnoise;
pub mod specfun;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use kernels::{Kernel, KernelFamily};
pub use noise::{MarkLaw, NoiseModel, VarianceProfile};
pub use shotnoise::{ArrivalSet, PathMeta, SamplePath, Scaling, SimConfig};

/// Seed used when none is given, so published figures can be regenerated.
pub const DEFAULT_SEED: u64 = 20240;
