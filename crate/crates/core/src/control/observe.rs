use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{obs_gramian_in, rect_in, Rect};
use crate::numeric::{fit_line, lit, symmetric_eigen, symmetric_eigenvalues, LineFit};
use crate::spectral::{EigenBasis, PreciseBasis};
use crate::{Extended, Real};

/// Largest exponent `2 λ_max T` the equilibrated Gramian can hold.
const MAX_EXPONENT: Real = 700.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityEstimate {
    pub lambda: Real,
    pub horizon: Real,
    pub dim: usize,
    /// `max ‖e^{−TA}z‖² / ∫₀ᵀ ‖e^{−tA}z‖²_{L²(ω)}` over `z ∈ span{λ_j ≤ Λ}`.
    pub c_obs: Real,
    /// Unit modal coefficients of the maximiser.
    pub direction: Vec<Real>,
    /// Smallest eigenvalue of the unit-diagonal scaling of `D⁻¹ O D⁻¹`.
    pub scaled_min_eig: Real,
}

/// Observability constant on the modes with `λ ≤ lambda`, in [`Extended`] precision.
///
/// `C_obs` is the largest `c` with `F a = c O a`, `F = diag(e^{−2λ_j T})`,
/// `O_{jl} = M_{jl}(1 − e^{−(λ_j+λ_l)T})/(λ_j+λ_l)`. Substituting `b = D a`
/// with `D = diag(e^{−λ_j T})` gives `C_obs = 1/λ_min(Ô)` for the graded
/// matrix `Ô_{jl} = M_{jl} expm1((λ_j+λ_l)T)/(λ_j+λ_l)`, diagonalised by Jacobi.
pub fn obs_constant(basis: &EigenBasis, lambda: Real, horizon: Real, region: &Rect) -> Result<ObservabilityEstimate> {
    obs_constant_in::<Extended>(basis, lambda, horizon, region)
}

/// [`obs_constant`] carried out in the scalar type `T`.
pub fn obs_constant_in<T: Float + FloatConst + Send + Sync>(
    basis: &EigenBasis,
    lambda: Real,
    horizon: Real,
    region: &Rect,
) -> Result<ObservabilityEstimate> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid(format!("T must be positive, got {horizon}")));
    }
    if lambda > basis.cutoff {
        return Err(Error::Configuration(format!("Lambda = {lambda} exceeds basis cutoff {}", basis.cutoff)));
    }
    let n = basis.count_below(lambda);
    if n == 0 {
        return Err(invalid(format!("no modes with lambda <= {lambda}")));
    }
    let lam_max = basis.modes[n - 1].lambda;
    if 2.0 * lam_max * horizon > MAX_EXPONENT {
        return Err(invalid(format!(
            "2 Lambda T = {} exceeds the representable range ({MAX_EXPONENT})",
            2.0 * lam_max * horizon
        )));
    }
    let precise = PreciseBasis::<T>::refine(basis, n)?;
    let (x1, x2) = rect_in::<T>(region);
    let m = obs_gramian_in(&precise, x1, x2);
    let t = lit::<T>(horizon);
    let lam: Vec<T> = precise.modes.iter().map(|m| m.lambda).collect();
    let mut o = vec![T::zero(); n * n];
    for j in 0..n {
        for l in 0..n {
            let s = lam[j] + lam[l];
            o[j * n + l] = m[j * n + l] * (s * t).exp_m1() / s;
        }
    }
    let scale: Vec<T> = (0..n).map(|j| o[j * n + j].sqrt()).collect();
    if scale.iter().any(|s| !(*s > T::zero())) {
        return Err(Error::ObservabilityDefect { min_eig: 0.0, direction: vec![] });
    }
    let scaled: Vec<T> = (0..n * n).map(|i| o[i] / (scale[i / n] * scale[i % n])).collect();
    let scaled_min = symmetric_eigenvalues(&scaled, n)[0];
    let eig = symmetric_eigen(&o, n, true);
    let min_eig = eig.values[0];
    let b = eig.vector(0).expect("vectors requested");
    // a_j ∝ e^{λ_j T} b_j, formed relative to the largest exponent.
    let mut a: Vec<T> = (0..n).map(|j| b[j] * ((lam[j] - lam[n - 1]) * t).exp()).collect();
    let norm = a.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    a.iter_mut().for_each(|x| *x = *x / norm);
    let big = (0..n).max_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).unwrap_or(std::cmp::Ordering::Equal));
    if let Some(i) = big {
        if a[i] < T::zero() {
            a.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let to_real = |v: T| v.to_f64().unwrap_or(Real::NAN);
    let direction: Vec<Real> = a.into_iter().map(to_real).collect();
    let threshold = T::epsilon() * lit(16.0 * n as Real);
    if !(scaled_min > threshold) || !(min_eig > T::zero()) {
        return Err(Error::ObservabilityDefect { min_eig: to_real(scaled_min), direction });
    }
    Ok(ObservabilityEstimate {
        lambda,
        horizon,
        dim: n,
        c_obs: to_real(min_eig.recip()),
        direction,
        scaled_min_eig: to_real(scaled_min),
    })
}

/// Abscissa of a constant/cost sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Values indexed by `T`, fitted against `1/T^γ`.
    Horizon { gamma: Real },
    /// Values indexed by `Λ`, fitted against `√Λ`.
    Cutoff,
}

/// Least-squares fit of `log value` against `1/T^γ` or `√Λ`.
///
/// `points` are `(T or Λ, value)` with positive values; at least four needed.
pub fn cost_and_constant_fit(points: &[(Real, Real)], axis: SweepAxis) -> Result<LineFit<Real>> {
    if points.len() < 4 {
        return Err(invalid(format!("fit needs at least 4 points, got {}", points.len())));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, v) in points {
        if !(x > 0.0 && x.is_finite()) || !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("sweep point ({x}, {v}) must be positive and finite")));
        }
        xs.push(match axis {
            SweepAxis::Horizon { gamma } => x.powf(-gamma),
            SweepAxis::Cutoff => x.sqrt(),
        });
        ys.push(v.ln());
    }
    fit_line(&xs, &ys).ok_or_else(|| invalid("degenerate abscissae: all sweep points coincide"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_synthetic_fit() {
        let gamma = 1.5;
        let pts: Vec<(Real, Real)> =
            [0.1, 0.2, 0.4, 0.8].iter().map(|&t: &Real| (t, (3.0 + 5.0 / t.powf(gamma)).exp())).collect();
        let f = cost_and_constant_fit(&pts, SweepAxis::Horizon { gamma }).unwrap();
        assert!((f.slope - 5.0).abs() < 1e-10);
        assert!((f.intercept - 3.0).abs() < 1e-9);
        let flat: Vec<(Real, Real)> = [25.0, 50.0, 100.0, 200.0].iter().map(|&l| (l, 7.0)).collect();
        assert!(cost_and_constant_fit(&flat, SweepAxis::Cutoff).unwrap().slope.abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_input() {
        let same = [(0.5, 2.0); 4];
        assert!(cost_and_constant_fit(&same, SweepAxis::Cutoff).is_err());
        assert!(cost_and_constant_fit(&same[..3], SweepAxis::Cutoff).is_err());
        assert!(cost_and_constant_fit(&[(0.1, 1.0), (0.2, -1.0), (0.3, 1.0), (0.4, 1.0)], SweepAxis::Cutoff).is_err());
    }
}
