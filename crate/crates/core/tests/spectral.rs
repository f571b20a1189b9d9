//! Eigenpairs checked against closed forms, the finite-difference pencil
//! and pointwise finite differences of the evaluated fields.

use std::f64::consts::PI;

use stokesheat::spectral::{default_k_max, fd_eigenvalues, mode_residuals, sector_eigenvalues};
use stokesheat::{
    assemble_basis, bracket_roots, build_mode, dispersion, eval_mode, oracle_eigs, refine_root, zero_mode,
    EigenMode, Error, Phase, SpectralSettings,
};

fn sector(k: u32, lambda_max: f64) -> Vec<f64> {
    sector_eigenvalues(k, lambda_max, &SpectralSettings::default()).unwrap()
}

#[test]
fn shear_sector_is_the_dirichlet_sine_series() {
    let fd = fd_eigenvalues(0, 400, 3).unwrap();
    for (n, l) in fd.iter().enumerate() {
        let exact = ((n + 1) as f64 * PI).powi(2);
        assert!((l - exact).abs() < 1e-3 * exact);
    }
    let lams = sector(0, 1000.0);
    let expected: Vec<f64> = (1..).map(|n: u32| (n as f64 * PI).powi(2)).take_while(|&l| l <= 1000.0).collect();
    assert_eq!(lams.len(), expected.len());
    for (a, b) in lams.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
    }
    let m = zero_mode(3).unwrap();
    // u₁ = sin(3πx₂)/√π, nothing else.
    let v = eval_mode(&m, 1.3, 0.1).unwrap();
    assert!((v.u1 - (0.3 * PI).sin() / PI.sqrt()).abs() < 1e-15);
    assert_eq!((v.u2, v.p, v.eta), (0.0, 0.0, 0.0));
    assert!(zero_mode(0).is_err());
}

#[test]
fn roots_agree_with_discretised_pencil() {
    for k in [1u32, 2, 5] {
        let ours = sector(k, 2000.0);
        let oracle = oracle_eigs(k, 200, 6).unwrap();
        for (a, o) in ours.iter().zip(&oracle) {
            let rel = (a - o.lambda).abs() / o.lambda;
            assert!(rel < 1e-6, "k={k}: {a} vs {} (rel {rel:e})", o.lambda);
        }
    }
}

#[test]
fn sector_counts_match_the_pencil() {
    // Count the discrete eigenvalues below a cutoff chosen away from any root.
    let cutoff = 300.0;
    for k in 0..=default_k_max(cutoff) {
        let ours = sector(k, cutoff);
        let fd = fd_eigenvalues(k, 300, ours.len() + 1).unwrap();
        let below = fd.iter().filter(|&&l| l <= cutoff).count();
        assert_eq!(below, ours.len(), "k = {k}: {fd:?} vs {ours:?}");
    }
}

#[test]
fn first_excluded_sector_starts_above_the_cutoff() {
    for cutoff in [50.0, 200.0, 800.0] {
        let k = default_k_max(cutoff) + 1;
        let lowest = fd_eigenvalues(k, 200, 1).unwrap()[0];
        assert!(lowest > cutoff, "k = {k}: {lowest} <= {cutoff}");
    }
}

#[test]
fn dispersion_changes_sign_on_each_bracket() {
    let k = 3;
    for (lo, hi) in bracket_roots(k, 600.0, 16.0) {
        let (a, b) = (dispersion(k, lo).unwrap(), dispersion(k, hi).unwrap());
        assert!(a * b <= 0.0);
        let root = refine_root(k, (lo, hi), 1e-14).unwrap();
        assert!(root >= lo && root <= hi);
    }
}

#[test]
fn degenerate_guard_and_bad_bracket_are_errors() {
    assert!(matches!(dispersion(4, 16.0), Err(Error::DegenerateBranch { .. })));
    let lams = sector(2, 200.0);
    let mid = 0.5 * (lams[0] + lams[1]);
    assert!(matches!(refine_root(2, (lams[0] + 1.0, mid), 1e-12), Err(Error::InvalidBracket { .. })));
    assert!(matches!(build_mode(2, mid, Phase::Cosine), Err(Error::NotAnEigenvalue { .. })));
}

/// `∂` by a fourth-order central difference of `eval_mode`.
fn fd<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

fn fd2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h)
}

fn check_pointwise(m: &EigenMode) {
    let v = |x1: f64, x2: f64| eval_mode(m, x1, x2).unwrap();
    let lam = m.lambda;
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &x1 in &[0.3, 1.7, 4.1] {
        for &x2 in &[0.2, 0.5, 0.85] {
            let div = fd(|x| v(x, x2).u1, x1, h) + fd(|y| v(x1, y).u2, x2, h);
            let lap1 = fd2(|x| v(x, x2).u1, x1, h) + fd2(|y| v(x1, y).u1, x2, h);
            let lap2 = fd2(|x| v(x, x2).u2, x1, h) + fd2(|y| v(x1, y).u2, x2, h);
            let px = fd(|x| v(x, x2).p, x1, h);
            let py = fd(|y| v(x1, y).p, x2, h);
            let here = v(x1, x2);
            worst = worst.max(div.abs()).max((-lap1 + px - lam * here.u1).abs()).max((-lap2 + py - lam * here.u2).abs());
            scale = scale.max(lam * here.u1.abs().max(here.u2.abs())).max(px.abs()).max(py.abs());
        }
        let bottom = v(x1, 0.0);
        let top = v(x1, 1.0);
        assert!(bottom.u1.abs() < 1e-12 && bottom.u2.abs() < 1e-12);
        assert!(top.u1.abs() < 1e-10);
        assert!((top.u2 - top.eta).abs() < 1e-12);
        // λη = −∂²ₓ₁η − p on the top wall.
        let etaxx = fd2(|x| v(x, 1.0).eta, x1, h);
        let heat = lam * top.eta + etaxx + top.p;
        assert!(heat.abs() <= 1e-6 * (lam * top.eta.abs() + etaxx.abs() + top.p.abs()).max(1.0), "heat {heat}");
    }
    assert!(worst <= 1e-5 * scale.max(1.0), "k={} λ={lam}: residual {worst} vs scale {scale}", m.k);
}

#[test]
fn fields_satisfy_the_equations_by_finite_differences() {
    for k in [1u32, 2, 4] {
        for (i, lam) in sector(k, 400.0).into_iter().take(3).enumerate() {
            for phase in [Phase::Cosine, Phase::Sine] {
                let m = build_mode(k, lam, phase).unwrap();
                check_pointwise(&m);
                if i == 0 {
                    assert!(mode_residuals(&m, 16, 17).max() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn basis_is_ordered_and_complete_in_both_phases() {
    let b = assemble_basis(300.0, default_k_max(300.0)).unwrap();
    assert!(b.modes.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    assert!(b.modes.iter().all(|m| m.lambda <= 300.0));
    for k in 1..=default_k_max(300.0) {
        let cos = b.modes.iter().filter(|m| m.k == k && m.phase == Some(Phase::Cosine)).count();
        let sin = b.modes.iter().filter(|m| m.k == k && m.phase == Some(Phase::Sine)).count();
        assert_eq!(cos, sin);
        assert_eq!(cos, sector(k, 300.0).len());
    }
    let shear = b.modes.iter().filter(|m| m.k == 0).count();
    assert_eq!(shear, (300f64.sqrt() / PI).floor() as usize);
}

#[test]
fn truncating_the_sector_range_is_reported() {
    // Sector 2 has eigenvalues far below 300.
    assert!(matches!(assemble_basis(300.0, 2), Err(Error::IncompleteBasis { k_max: 2, .. })));
    assert!(matches!(assemble_basis(300.0, 0), Err(Error::InvalidArgument(_))));
}
