use crate::error::{invalid, Error, Result};
use crate::numeric::bisect;
use crate::spectral::profile::{boundary_matrix, classify, degeneracy_tolerance, Branch};
use crate::Real;

/// Relative half-width of the guard interval around `λ = k²`.
pub const DEFAULT_DEGENERACY_REL: Real = 1e-8;

/// Characteristic determinant of sector `k ≥ 1` at `λ`.
///
/// Zeros in `λ` are exactly the sector eigenvalues. Each boundary row is
/// scaled to unit Euclidean norm, which keeps the value O(1) for the
/// ranges used here without moving the zeros.
pub fn dispersion(k: u32, lambda: Real) -> Result<Real> {
    dispersion_with(k, lambda, DEFAULT_DEGENERACY_REL)
}

pub fn dispersion_with(k: u32, lambda: Real, degeneracy_rel: Real) -> Result<Real> {
    if k == 0 {
        return Err(invalid("dispersion is defined for sectors k >= 1"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    match classify(k, lambda, degeneracy_rel) {
        Branch::Degenerate => Err(Error::DegenerateBranch { k, lambda }),
        branch => Ok(boundary_matrix(k, lambda, branch).determinant()),
    }
}

/// Sign-change brackets of the dispersion function on `(0, Λ]`.
///
/// Above `k²` the scan grid is uniform in `β = √(λ − k²)` with `density`
/// samples per unit; below `k²` it is uniform in `√λ`. The guard interval
/// `|λ − k²| ≤ δ_deg` is skipped and both sides are scanned separately.
pub fn bracket_roots(k: u32, lambda_max: Real, density: Real) -> Vec<(Real, Real)> {
    bracket_roots_with(k, lambda_max, density, DEFAULT_DEGENERACY_REL)
}

pub fn bracket_roots_with(
    k: u32,
    lambda_max: Real,
    density: Real,
    degeneracy_rel: Real,
) -> Vec<(Real, Real)> {
    assert!(k >= 1, "bracket_roots needs k >= 1");
    assert!(density >= 4.0, "density must be at least 4 samples per unit");
    if !(lambda_max > 0.0) {
        return Vec::new();
    }
    let k2 = k as Real * k as Real;
    let guard = degeneracy_tolerance(k, degeneracy_rel);
    let mut grid: Vec<Real> = Vec::new();

    // Evanescent side: uniform in sqrt(lambda) on (0, min(k^2 - guard, Λ)].
    let ev_top = (k2 - guard).min(lambda_max);
    if ev_top > 0.0 {
        let top = ev_top.sqrt();
        let steps = ((top * density).ceil() as usize).max(1);
        // lambda = 0 is excluded; start just inside.
        let start = top * 1e-6;
        for i in 0..=steps {
            let s = start + (top - start) * i as Real / steps as Real;
            grid.push(s * s);
        }
        if let Some(last) = grid.last_mut() {
            *last = ev_top;
        }
    }
    let mut brackets = scan(k, &grid, degeneracy_rel);

    // Oscillatory side: uniform in beta on [sqrt(guard), sqrt(Λ - k^2)].
    if lambda_max > k2 + guard {
        let b_lo = guard.sqrt();
        let b_hi = (lambda_max - k2).sqrt();
        let steps = (((b_hi - b_lo) * density).ceil() as usize).max(1);
        let grid: Vec<Real> = (0..=steps)
            .map(|i| {
                let b = b_lo + (b_hi - b_lo) * i as Real / steps as Real;
                if i == 0 {
                    k2 + guard
                } else if i == steps {
                    lambda_max
                } else {
                    k2 + b * b
                }
            })
            .collect();
        brackets.extend(scan(k, &grid, degeneracy_rel));
    }
    brackets
}

fn scan(k: u32, grid: &[Real], degeneracy_rel: Real) -> Vec<(Real, Real)> {
    let mut out = Vec::new();
    let mut prev: Option<(Real, Real)> = None;
    for &lam in grid {
        let Ok(v) = dispersion_with(k, lam, degeneracy_rel) else {
            prev = None;
            continue;
        };
        if let Some((pl, pv)) = prev {
            if lam > pl && pv.signum() != v.signum() {
                out.push((pl, lam));
            }
        }
        prev = Some((lam, v));
    }
    out
}

/// Refines a sign-change bracket by bisection to relative width `tol`.
pub fn refine_root(k: u32, bracket: (Real, Real), tol: Real) -> Result<Real> {
    refine_root_with(k, bracket, tol, DEFAULT_DEGENERACY_REL)
}

pub fn refine_root_with(
    k: u32,
    (lo, hi): (Real, Real),
    tol: Real,
    degeneracy_rel: Real,
) -> Result<Real> {
    if !(lo < hi) {
        return Err(invalid(format!("bracket [{lo}, {hi}] is empty")));
    }
    let f_lo = dispersion_with(k, lo, degeneracy_rel)?;
    let f_hi = dispersion_with(k, hi, degeneracy_rel)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidBracket { k, lo, hi });
    }
    let r = bisect(|x| dispersion_with(k, x, degeneracy_rel), lo, hi, f_lo, tol)?;
    Ok(r.midpoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_point() {
        assert!(matches!(dispersion(3, 9.0), Err(Error::DegenerateBranch { .. })));
        assert!(dispersion(3, 9.0 + 1e-3).is_ok());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(dispersion(0, 1.0).is_err());
        assert!(dispersion(1, -1.0).is_err());
    }

    #[test]
    fn no_brackets_below_first_eigenvalue() {
        assert!(bracket_roots(1, 1e-3, 16.0).is_empty());
        assert!(bracket_roots(1, 1.0, 16.0).is_empty());
    }

    #[test]
    fn invalid_bracket_reported() {
        let b = bracket_roots(1, 200.0, 16.0);
        let (lo, _) = b[0];
        let (_, hi) = b[1];
        assert!(matches!(refine_root(1, (lo, hi), 1e-12), Err(Error::InvalidBracket { .. })));
    }

    #[test]
    fn narrow_bracket_returns_midpoint() {
        let b = bracket_roots(2, 100.0, 16.0)[0];
        let r = refine_root(2, b, 1e-15).unwrap();
        let narrow = (r * (1.0 - 1e-13), r * (1.0 + 1e-13));
        let again = refine_root(2, narrow, 1e-9).unwrap();
        assert_eq!(again, 0.5 * (narrow.0 + narrow.1));
    }

    #[test]
    fn tightening_tolerance_stays_inside_enclosure() {
        for (k, b) in [(1, 0usize), (3, 2)] {
            let br = bracket_roots(k, 300.0, 16.0)[b];
            let coarse = refine_root(k, br, 1e-9).unwrap();
            let fine = refine_root(k, br, 1e-12).unwrap();
            assert!((coarse - fine).abs() <= 1e-9 * fine);
        }
    }

    #[test]
    fn doubling_density_keeps_bracket_count() {
        for k in 1..=4 {
            for lam in [50.0, 150.0, 400.0] {
                let a = bracket_roots(k, lam, 16.0).len();
                let b = bracket_roots(k, lam, 32.0).len();
                assert_eq!(a, b, "k={k} Λ={lam}");
            }
        }
    }

    #[test]
    fn no_sector_eigenvalue_below_k_squared() {
        for k in 1..=12 {
            let k2 = (k * k) as Real;
            let b = bracket_roots(k, k2, 32.0);
            assert!(b.is_empty(), "k={k}: {b:?}");
        }
    }
}
