mod common;

use std::f64::consts::PI;

use common::{brute_mass, composite, random_state};
use stokesheat::hilbert::{gram_matrix_in, obs_gramian_in, rect_in};
use stokesheat::spectral::{default_k_max, Field};
use stokesheat::specineq::{spec_ineq_report_in, weighted_gramian_in, SampleGrid};
use stokesheat::{
    assemble_basis, augmented_field, obs_gramian, residual_augmented, spec_ineq_report, weighted_gramian,
    EigenBasis, Extended, Kernel, PreciseBasis, Rect,
};

fn basis(lambda_max: f64) -> EigenBasis {
    assemble_basis(lambda_max, default_k_max(lambda_max)).unwrap()
}

const STRIP: Rect = Rect { x1: (0.0, PI / 2.0), x2: (0.4, 0.6) };

/// `∫ₐᵇ f` by the composite trapezoid rule on `n` points.
fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / (n - 1) as f64;
    let inner: f64 = (1..n - 1).map(|i| f(a + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

#[test]
fn kernel_moments_match_a_million_point_trapezoid() {
    let k = Kernel::canonical(1.0).unwrap();
    let (a, b) = k.support;
    let l2 = trapezoid(|s| k.kappa(s).powi(2), a, b, 1_000_000);
    assert!((k.l2_squared() - l2).abs() <= 1e-9 * l2, "{} vs {l2}", k.l2_squared());
    for c in [3.0, 25.0] {
        let reference = trapezoid(|s| k.kappa(s).powi(2) * (c * s).cosh(), a, b, 1_000_000);
        assert!((k.cosh_moment(c) - reference).abs() <= 1e-9 * reference);
    }
    let peak = k.kappa(0.5 * (a + b));
    assert!((peak - 1.0).abs() < 1e-15);
    assert_eq!(k.kappa(a), 0.0);
    assert_eq!(k.kappa(1.2), 0.0);
}

#[test]
fn kernel_support_is_validated() {
    assert!(Kernel::new(1.0, (0.2, 0.8)).is_ok());
    assert!(Kernel::new(1.0, (0.0, 0.8)).is_err());
    assert!(Kernel::new(1.0, (0.5, 0.5)).is_err());
    assert!(Kernel::new(1.0, (0.2, 1.0)).is_err());
    assert!(Kernel::new(-1.0, (0.2, 0.8)).is_err());
}

#[test]
fn weighted_form_matches_nested_quadrature() {
    let b = basis(60.0);
    let kernel = Kernel::canonical(1.0).unwrap();
    let rect = Rect { x1: (0.2, 2.0), x2: (0.35, 0.65) };
    let k = weighted_gramian(&b, 60.0, &rect, &kernel).unwrap();
    let n = k.nrows();
    let m = brute_mass(&b.modes[..n], &rect);
    let z = random_state(&b, n, 5);
    let a = &z.coeffs[..n];
    let s_rule = composite(kernel.support.0, kernel.support.1, 40, 20);
    let mut reference = 0.0;
    for &(s, w) in &s_rule {
        let c: Vec<f64> = (0..n).map(|j| a[j] * (b.modes[j].lambda.sqrt() * s).cosh()).collect();
        let mut q = 0.0;
        for j in 0..n {
            for l in 0..n {
                q += c[j] * m[(j, l)] * c[l];
            }
        }
        reference += w * kernel.kappa(s).powi(2) * q;
    }
    let mut ours = 0.0;
    for j in 0..n {
        for l in 0..n {
            ours += a[j] * k[(j, l)] * a[l];
        }
    }
    assert!((ours - reference).abs() <= 1e-10 * reference, "{ours} vs {reference}");
}

#[test]
fn extended_and_double_assembly_agree_where_double_suffices() {
    let b = basis(60.0);
    let kernel = Kernel::canonical(1.0).unwrap();
    let k = weighted_gramian(&b, 60.0, &STRIP, &kernel).unwrap();
    let n = k.nrows();
    let precise = PreciseBasis::<Extended>::refine(&b, n).unwrap();
    let (x1, x2) = rect_in::<Extended>(&STRIP);
    let m = obs_gramian_in(&precise, x1, x2);
    let kd = weighted_gramian_in(&precise, &m, n, &kernel);
    let scale = k.amax();
    for j in 0..n {
        for l in 0..n {
            let d = (kd[j * n + l].to_f64() - k[(j, l)]).abs();
            assert!(d <= 1e-12 * scale, "({j},{l}): {d:e}");
        }
    }
    // The same Gramian straight from f64 modes.
    let mf = obs_gramian(&b, &STRIP);
    for j in 0..n {
        for l in 0..n {
            assert!((m[j * n + l].to_f64() - mf.m[(j, l)]).abs() < 1e-14);
        }
    }
}

#[test]
fn refined_basis_is_orthonormal_to_extended_precision() {
    let b = basis(200.0);
    let precise = PreciseBasis::<Extended>::refine(&b, b.len()).unwrap();
    let g = gram_matrix_in(&precise);
    let n = b.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        for l in 0..n {
            let target = if j == l { 1.0 } else { 0.0 };
            worst = worst.max((g[j * n + l] - Extended::from_f64(target)).to_f64().abs());
        }
    }
    assert!(worst < 1e-28, "{worst:e}");
    for (p, m) in precise.modes.iter().zip(&b.modes) {
        assert!((p.lambda.to_f64() - m.lambda).abs() <= 1e-13 * m.lambda);
    }
}

#[test]
fn minimum_eigenvalues_match_high_precision_references() {
    // 50-digit evaluations of the same K for ω = (0, π/2)×(0.4, 0.6), S₀ = 1.
    let reference = [
        (25.0, 2.89688491095205e-7),
        (50.0, 1.21785139698534e-9),
        (100.0, 4.05209585435118e-14),
        (200.0, 2.30044715062952e-18),
    ];
    let b = basis(200.0);
    let kernel = Kernel::canonical(1.0).unwrap();
    let lambdas: Vec<f64> = reference.iter().map(|r| r.0).collect();
    let report = spec_ineq_report(&b, &lambdas, &STRIP, &kernel).unwrap();
    for (rec, (lam, want)) in report.records.iter().zip(reference) {
        assert_eq!(rec.lambda, lam);
        let rel = (rec.min_eig - want).abs() / want;
        assert!(rel < 1e-11, "Λ = {lam}: {} vs {want} ({rel:e})", rec.min_eig);
        assert!(rec.min_eig >= rec.cosh_lower_bound);
        assert!(!rec.violation);
    }
    assert!(report.records.windows(2).all(|w| w[1].min_eig < w[0].min_eig));
}

#[test]
fn double_precision_report_agrees_at_small_cutoffs() {
    let b = basis(60.0);
    let kernel = Kernel::canonical(1.0).unwrap();
    let list = [15.0, 25.0, 40.0];
    let ext = spec_ineq_report(&b, &list, &STRIP, &kernel).unwrap();
    let dbl = spec_ineq_report_in::<f64>(&b, &list, &STRIP, &kernel).unwrap();
    for (x, y) in ext.records.iter().zip(&dbl.records) {
        assert_eq!(x.dim, y.dim);
        assert!((x.min_eig - y.min_eig).abs() <= 1e-8 * x.min_eig, "{} vs {}", x.min_eig, y.min_eig);
    }
    assert!(spec_ineq_report(&b, &[15.0, 25.0], &STRIP, &kernel).is_err());
    assert!(spec_ineq_report(&b, &[15.0, 25.0, 80.0], &STRIP, &kernel).is_err());
}

fn thirty_mode_field(seed: u64) -> (EigenBasis, stokesheat::AugmentedField, SampleGrid) {
    let b = basis(150.0);
    let z = random_state(&b, 30, seed);
    let grid = SampleGrid::uniform(1.0, 20, 20, 20);
    let lambda = b.modes[29].lambda;
    let rect = Rect { x1: (0.0, PI), x2: (0.3, 0.7) };
    let field = augmented_field(&b, &z.coeffs, lambda, &rect, &grid.s).unwrap();
    (b, field, grid)
}

#[test]
fn augmented_system_residuals_vanish() {
    for seed in [1, 2] {
        let (_, field, grid) = thirty_mode_field(seed);
        let r = residual_augmented(&field, &grid);
        assert!(r.max() <= 1e-7, "{r:?}");
    }
}

#[test]
fn pressure_gauge_does_not_change_the_system() {
    let (_, mut field, grid) = thirty_mode_field(4);
    let before = residual_augmented(&field, &grid);
    field.gauge_shift = 17.0;
    let after = residual_augmented(&field, &grid);
    assert!(after.max() <= 1e-7, "{after:?}");
    assert!((before.divergence - after.divergence).abs() < 1e-15);
}

#[test]
fn second_s_derivative_is_consistent_with_differences() {
    let (_, field, _) = thirty_mode_field(9);
    let (s, x1, x2) = (0.45, 1.1, 0.6);
    for f in [Field::U1, Field::U2, Field::P] {
        let exact = field.eval(f, 2, 0, 0, s, x1, x2);
        let err = |h: f64| {
            let d = (field.eval(f, 0, 0, 0, s + h, x1, x2) - 2.0 * field.eval(f, 0, 0, 0, s, x1, x2)
                + field.eval(f, 0, 0, 0, s - h, x1, x2))
                / (h * h);
            (d - exact).abs()
        };
        let (e1, e2, e3) = (err(0.02), err(0.01), err(0.005));
        let (p1, p2) = ((e1 / e2).log2(), (e2 / e3).log2());
        assert!((p1 - 2.0).abs() < 0.1 && (p2 - 2.0).abs() < 0.1, "{f:?}: orders {p1}, {p2}");
    }
}

#[test]
fn coefficients_above_the_cutoff_are_rejected() {
    let b = basis(100.0);
    let z = random_state(&b, b.len(), 1);
    let rect = Rect { x1: (0.0, PI), x2: (0.3, 0.7) };
    assert!(augmented_field(&b, &z.coeffs, 50.0, &rect, &[0.5]).is_err());
    assert!(augmented_field(&b, &z.coeffs[..3], 100.0, &rect, &[0.5]).is_err());
}
