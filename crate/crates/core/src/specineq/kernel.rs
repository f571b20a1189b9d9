use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::integrate_adaptive;
use crate::Real;

/// Peak-normalised bump `κ(s) = exp(−1/((s−a)(b−s)) + 4/(b−a)²)` on `(a, b) ⊂ (0, S₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kernel {
    pub s0: Real,
    pub support: (Real, Real),
}

/// Relative tolerance of every s-integral.
pub const S_RTOL: Real = 1e-13;
const MAX_INTERVALS: usize = 4000;

impl Kernel {
    pub fn new(s0: Real, support: (Real, Real)) -> Result<Self> {
        let (a, b) = support;
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(invalid(format!("S0 must be positive, got {s0}")));
        }
        if !(0.0 < a && a < b && b < s0) {
            return Err(invalid(format!("kernel support [{a}, {b}] must satisfy 0 < a < b < S0 = {s0}")));
        }
        Ok(Kernel { s0, support })
    }

    /// Support `[S₀/4, 3S₀/4]`.
    pub fn canonical(s0: Real) -> Result<Self> {
        Kernel::new(s0, (0.25 * s0, 0.75 * s0))
    }

    /// `log κ(s)`; `−∞` outside the open support.
    pub fn log_kappa(&self, s: Real) -> Real {
        let (a, b) = self.support;
        if s <= a || s >= b {
            return Real::NEG_INFINITY;
        }
        let w = b - a;
        -1.0 / ((s - a) * (b - s)) + 4.0 / (w * w)
    }

    pub fn kappa(&self, s: Real) -> Real {
        self.log_kappa(s).exp()
    }

    /// `∫ κ²(s) cosh(c s) ds`, integrand assembled in log space.
    pub fn cosh_moment(&self, c: Real) -> Real {
        let (a, b) = self.support;
        let c = c.abs();
        let q = integrate_adaptive(
            |s: Real| (2.0 * self.log_kappa(s) + log_cosh(c * s)).exp(),
            a,
            b,
            S_RTOL,
            0.0,
            MAX_INTERVALS,
        );
        q.value
    }

    /// `∫ κ²`.
    pub fn l2_squared(&self) -> Real {
        self.cosh_moment(0.0)
    }
}

pub(crate) fn log_cosh(x: Real) -> Real {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_is_one() {
        let k = Kernel::canonical(1.0).unwrap();
        assert!((k.kappa(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(k.kappa(0.25), 0.0);
        assert_eq!(k.kappa(0.9), 0.0);
    }

    #[test]
    fn rejects_bad_support() {
        assert!(Kernel::new(1.0, (0.0, 0.5)).is_err());
        assert!(Kernel::new(1.0, (0.5, 1.0)).is_err());
        assert!(Kernel::new(-1.0, (0.1, 0.2)).is_err());
    }

    #[test]
    fn log_cosh_stable() {
        assert!((log_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((log_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }
}
