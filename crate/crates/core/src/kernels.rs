//! Response functions attached to each shot.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// `(log t - log u)₊^β`, a function of the ratio t/u.
    Logarithmic,
    /// `(t - u)₊^β`, a function of the difference t - u.
    Polynomial,
}

/// A response kernel with exponent β ∈ (0, 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    family: KernelFamily,
    beta: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(domain!("kernel exponent beta must lie in (0, 1/2), got {beta}"));
        }
        Ok(Self { family, beta })
    }

    pub fn logarithmic(beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Logarithmic, beta)
    }

    pub fn polynomial(beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Polynomial, beta)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Response at time `t` of a shot that arrived at `u`.
    pub fn eval(&self, t: f64, u: f64) -> Result<f64> {
        if !(t > 0.0 && u > 0.0) {
            return Err(domain!("kernel arguments must be positive, got t = {t}, u = {u}"));
        }
        let gap = match self.family {
            KernelFamily::Logarithmic => t.ln() - u.ln(),
            KernelFamily::Polynomial => t - u,
        };
        Ok(self.positive_part_pow(gap))
    }

    /// `x₊^β`; also used by the path evaluator with precomputed logarithms.
    #[inline]
    pub(crate) fn positive_part_pow(&self, x: f64) -> f64 {
        if x > 0.0 {
            x.powf(self.beta)
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let log = Kernel::logarithmic(0.25).unwrap();
        let u = 3.7;
        assert!((log.eval(std::f64::consts::E * u, u).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(log.eval(1.0, 2.0).unwrap(), 0.0);
        assert_eq!(log.eval(2.0, 2.0).unwrap(), 0.0);
        let poly = Kernel::polynomial(0.3).unwrap();
        assert_eq!(poly.eval(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(poly.eval(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        for beta in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
            assert!(Kernel::logarithmic(beta).is_err());
        }
        let k = Kernel::polynomial(0.2).unwrap();
        assert!(k.eval(0.0, 1.0).is_err());
        assert!(k.eval(1.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn log_kernel_scale_invariant(beta in 0.01f64..0.49, t in 0.01f64..100.0,
                                      u in 0.01f64..100.0, c in 0.01f64..100.0) {
            let k = Kernel::logarithmic(beta).unwrap();
            let a = k.eval(c * t, c * u).unwrap();
            let b = k.eval(t, u).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }

        #[test]
        fn poly_kernel_translation_covariant(beta in 0.01f64..0.49, t in 0.01f64..100.0,
                                             u in 0.01f64..100.0, h in 0.0f64..100.0) {
            let k = Kernel::polynomial(beta).unwrap();
            let a = k.eval(t + h, u + h).unwrap();
            let b = k.eval(t, u).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
        }

        #[test]
        fn monotone_in_t(beta in 0.01f64..0.49, u in 0.01f64..10.0,
                         t1 in 0.01f64..20.0, dt in 0.0f64..20.0, log in any::<bool>()) {
            let family = if log { KernelFamily::Logarithmic } else { KernelFamily::Polynomial };
            let k = Kernel::new(family, beta).unwrap();
            prop_assert!(k.eval(t1 + dt, u).unwrap() >= k.eval(t1, u).unwrap());
        }
    }
}
