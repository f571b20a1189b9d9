//! Per-sector stream-function profiles.
//!
//! In sector `k ≥ 1` the cosine-phase eigenfunction is
//! `u = (−φ′(x₂) sin(k x₁) / k, φ(x₂) cos(k x₁))`, `p = p̂(x₂) cos(k x₁)`,
//! `η = φ(1) cos(k x₁)` with `p̂ = (φ‴ + (λ − k²) φ′) / k²`. The profile
//! solves `(D² − k²)(D² + λ − k²) φ = 0` with `φ(0) = φ′(0) = φ′(1) = 0` and
//! `k²(k² − λ) φ(1) − φ‴(1) = 0`.

use serde::{Deserialize, Serialize};

use num_traits::Float;

use crate::numeric::lit;
use crate::Real;

/// Which fundamental system spans the `D² + λ − k²` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `λ > k²`: `cos(βx)`, `sin(βx)/β` with `β = √(λ − k²)`.
    Oscillatory,
    /// `λ < k²`: `cosh(γx)`, `sinh(γx)/γ` with `γ = √(k² − λ)`.
    Evanescent,
    /// `λ = k²`: `1`, `x`.
    Degenerate,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Oscillatory => "oscillatory",
            Branch::Evanescent => "evanescent",
            Branch::Degenerate => "degenerate",
        }
    }
}

/// Guard half-width around `λ = k²`.
pub fn degeneracy_tolerance(k: u32, rel: Real) -> Real {
    rel * (k as Real * k as Real).max(1.0)
}

pub fn classify(k: u32, lambda: Real, rel: Real) -> Branch {
    let k2 = k as Real * k as Real;
    let d = lambda - k2;
    if d.abs() <= degeneracy_tolerance(k, rel) {
        Branch::Degenerate
    } else if d > 0.0 {
        Branch::Oscillatory
    } else {
        Branch::Evanescent
    }
}

/// `β` or `γ` for the branch (zero when degenerate).
pub fn branch_rate(k: u32, lambda: Real, branch: Branch) -> Real {
    let d = lambda - k as Real * k as Real;
    match branch {
        Branch::Oscillatory => d.sqrt(),
        Branch::Evanescent => (-d).sqrt(),
        Branch::Degenerate => 0.0,
    }
}

/// `order`-th derivative of the four fundamental solutions at `x`:
/// `e^{−kx}`, `e^{−k(1−x)}` and the branch pair.
pub fn fundamental<T: Float>(k: u32, rate: T, branch: Branch, x: T, order: u32) -> [T; 4] {
    let kf = lit::<T>(k as f64);
    let (zero, one) = (T::zero(), T::one());
    let e0 = (-kf * x).exp();
    let e1 = (-kf * (one - x)).exp();
    let kp = kf.powi(order as i32);
    let b0 = if order % 2 == 0 { kp * e0 } else { -kp * e0 };
    let b1 = kp * e1;
    let (b2, b3) = match branch {
        Branch::Oscillatory => {
            let (s, c) = (rate * x).sin_cos();
            // d^n cos(βx) = β^n cos(βx + nπ/2); d^n sin(βx)/β = β^{n-1} sin(βx + nπ/2).
            let (cs, sn) = match order % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            let bn = rate.powi(order as i32);
            let bn1 = if order == 0 { rate.recip() } else { rate.powi(order as i32 - 1) };
            (bn * cs, bn1 * sn)
        }
        Branch::Evanescent => {
            let ch = (rate * x).cosh();
            let sh = (rate * x).sinh();
            let gn = rate.powi(order as i32);
            let gn1 = if order == 0 { rate.recip() } else { rate.powi(order as i32 - 1) };
            if order % 2 == 0 {
                (gn * ch, gn1 * sh)
            } else {
                (gn * sh, gn1 * ch)
            }
        }
        Branch::Degenerate => match order {
            0 => (one, x),
            1 => (zero, one),
            _ => (zero, zero),
        },
    };
    [b0, b1, b2, b3]
}

/// Row-normalised boundary conditions `φ(0), φ′(0), φ′(1)` and the top
/// heat equation, as a 4×4 array of rows.
pub fn boundary_rows<T: Float>(k: u32, lambda: T, rate: T, branch: Branch) -> [[T; 4]; 4] {
    let kf = lit::<T>(k as f64);
    let (zero, one) = (T::zero(), T::one());
    let f00 = fundamental(k, rate, branch, zero, 0);
    let f01 = fundamental(k, rate, branch, zero, 1);
    let f11 = fundamental(k, rate, branch, one, 1);
    let f10 = fundamental(k, rate, branch, one, 0);
    let f13 = fundamental(k, rate, branch, one, 3);
    let coupling = kf * kf * (kf * kf - lambda);
    let mut rows = [f00, f01, f11, [zero; 4]];
    for i in 0..4 {
        rows[3][i] = coupling * f10[i] - f13[i];
    }
    for row in rows.iter_mut() {
        let norm = row.iter().fold(zero, |acc, &v| acc + v * v).sqrt();
        row.iter_mut().for_each(|v| *v = *v / norm);
    }
    rows
}

/// Row-normalised 4×4 boundary matrix for `(k, λ)` in the given branch.
pub fn boundary_matrix(k: u32, lambda: Real, branch: Branch) -> nalgebra::Matrix4<Real> {
    let rows = boundary_rows(k, lambda, branch_rate(k, lambda, branch), branch);
    nalgebra::Matrix4::from_fn(|r, c| rows[r][c])
}

/// Stream-function profile of one sector eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamProfile {
    pub k: u32,
    pub lambda: Real,
    pub branch: Branch,
    pub c: [Real; 4],
    pub norm_factor: Real,
}

impl StreamProfile {
    pub fn rate(&self) -> Real {
        branch_rate(self.k, self.lambda, self.branch)
    }

    /// Unnormalised `φ^{(order)}(x)`.
    pub fn raw(&self, x: Real, order: u32) -> Real {
        let f = fundamental(self.k, self.rate(), self.branch, x, order);
        f.iter().zip(&self.c).map(|(a, b)| a * b).sum()
    }

    /// Normalised `φ^{(order)}(x)`.
    pub fn phi(&self, x: Real, order: u32) -> Real {
        self.norm_factor * self.raw(x, order)
    }

    /// Normalised `p̂^{(order)}(x) = (φ^{(order+3)} + (λ − k²) φ^{(order+1)}) / k²`.
    pub fn pressure(&self, x: Real, order: u32) -> Real {
        let k2 = self.k as Real * self.k as Real;
        (self.phi(x, order + 3) + (self.lambda - k2) * self.phi(x, order + 1)) / k2
    }

    /// Normalised `(φ′/k)^{(order)}`, the x₂-profile of the horizontal velocity.
    pub fn horizontal(&self, x: Real, order: u32) -> Real {
        self.phi(x, order + 1) / self.k as Real
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(Real) -> Real, x: Real) -> Real {
        let h = 1e-5;
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn derivatives_consistent_with_finite_differences() {
        for (branch, lambda) in [
            (Branch::Oscillatory, 30.0),
            (Branch::Evanescent, 2.0),
            (Branch::Degenerate, 9.0),
        ] {
            let k = 3;
            let rate = branch_rate(k, lambda, branch);
            for order in 0..5 {
                for &x in &[0.2, 0.55, 0.9] {
                    let exact = fundamental(k, rate, branch, x, order + 1);
                    for i in 0..4 {
                        let num = fd(|y| fundamental(k, rate, branch, y, order)[i], x);
                        let scale = exact[i].abs().max(1.0);
                        assert!(
                            (num - exact[i]).abs() < 1e-6 * scale,
                            "{branch:?} order {order} col {i}: {num} vs {}",
                            exact[i]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fundamental_solutions_satisfy_fourth_order_ode() {
        let k = 2;
        for (branch, lambda) in [(Branch::Oscillatory, 17.0), (Branch::Evanescent, 1.5)] {
            let rate = branch_rate(k, lambda, branch);
            let k2 = (k * k) as Real;
            for &x in &[0.0, 0.3, 1.0] {
                let d0 = fundamental(k, rate, branch, x, 0);
                let d2 = fundamental(k, rate, branch, x, 2);
                let d4 = fundamental(k, rate, branch, x, 4);
                for i in 0..4 {
                    let r = d4[i] + (lambda - 2.0 * k2) * d2[i] - k2 * (lambda - k2) * d0[i];
                    assert!(r.abs() < 1e-11 * (1.0 + d4[i].abs()), "{r}");
                }
            }
        }
    }

    #[test]
    fn classify_guard() {
        assert_eq!(classify(2, 4.0 + 1e-9, 1e-8), Branch::Degenerate);
        assert_eq!(classify(2, 5.0, 1e-8), Branch::Oscillatory);
        assert_eq!(classify(2, 3.0, 1e-8), Branch::Evanescent);
    }
}
