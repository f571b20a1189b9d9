//! Reference computations shared by the integration tests. Nothing here
//! goes through the crate's quadrature, Gramian or propagation code.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokesheat::{eval_mode, EigenBasis, EigenMode, Rect, StateVector};

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss rule: `panels` equal pieces of `[a, b]`, `n` nodes each.
pub fn composite(a: f64, b: f64, panels: usize, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * n);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// `∫_rect u_j · u_l` by tensor quadrature of the pointwise fields.
pub fn brute_mass(modes: &[EigenMode], rect: &Rect) -> DMatrix<f64> {
    let q1 = composite(rect.x1.0, rect.x1.1, 8, 24);
    let q2 = composite(rect.x2.0, rect.x2.1, 6, 24);
    let n = modes.len();
    let mut m = DMatrix::zeros(n, n);
    let mut vals = vec![(0.0, 0.0); n];
    for &(x1, w1) in &q1 {
        for &(x2, w2) in &q2 {
            for (v, mode) in vals.iter_mut().zip(modes) {
                let e = eval_mode(mode, x1, x2).unwrap();
                *v = (e.u1, e.u2);
            }
            let w = w1 * w2;
            for j in 0..n {
                for l in j..n {
                    m[(j, l)] += w * (vals[j].0 * vals[l].0 + vals[j].1 * vals[l].1);
                }
            }
        }
    }
    m.fill_lower_triangle_with_upper_triangle();
    m
}

/// `∫_𝕋 η_j η_l`.
pub fn brute_trace(modes: &[EigenMode]) -> DMatrix<f64> {
    let q = composite(0.0, 2.0 * std::f64::consts::PI, 8, 24);
    DMatrix::from_fn(modes.len(), modes.len(), |j, l| q.iter().map(|&(x, w)| w * modes[j].eta(x) * modes[l].eta(x)).sum())
}

/// Random unit state on the `count` lowest modes.
pub fn random_state(basis: &EigenBasis, count: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0.0; basis.len()];
    for v in c.iter_mut().take(count) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= nrm);
    StateVector::from_coeffs(basis, c).unwrap()
}

/// Classical RK4 for `a' = −Λa + M g(t)` over `[t0, t1]` with fixed step `h`.
pub fn rk4<G: Fn(f64) -> Vec<f64>>(
    lam: &[f64],
    m: &DMatrix<f64>,
    control: G,
    a0: &[f64],
    t0: f64,
    t1: f64,
    h: f64,
) -> Vec<f64> {
    let steps = ((t1 - t0) / h).round().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let n = a0.len();
    let rhs = |t: f64, a: &[f64]| -> Vec<f64> {
        let g = control(t);
        (0..n)
            .map(|l| -lam[l] * a[l] + g.iter().enumerate().map(|(j, gj)| m[(l, j)] * gj).sum::<f64>())
            .collect()
    };
    let mut a = a0.to_vec();
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let k1 = rhs(t, &a);
        let y: Vec<f64> = (0..n).map(|i| a[i] + 0.5 * h * k1[i]).collect();
        let k2 = rhs(t + 0.5 * h, &y);
        let y: Vec<f64> = (0..n).map(|i| a[i] + 0.5 * h * k2[i]).collect();
        let k3 = rhs(t + 0.5 * h, &y);
        let y: Vec<f64> = (0..n).map(|i| a[i] + h * k3[i]).collect();
        let k4 = rhs(t + h, &y);
        for i in 0..n {
            a[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    a
}

/// `∫₀^w e^{−Λ(w−t)} M e^{−Λ(w−t)} dt` by the composite trapezoid rule.
pub fn trapezoid_gramian(lam: &[f64], m: &DMatrix<f64>, w: f64, nodes: usize) -> DMatrix<f64> {
    let n = lam.len();
    let h = w / (nodes - 1) as f64;
    let mut g = DMatrix::zeros(n, n);
    for q in 0..nodes {
        let s = w - q as f64 * h;
        let wt = if q == 0 || q == nodes - 1 { 0.5 * h } else { h };
        let e: Vec<f64> = lam.iter().map(|l| (-l * s).exp()).collect();
        for j in 0..n {
            for l in 0..n {
                g[(j, l)] += wt * e[j] * m[(j, l)] * e[l];
            }
        }
    }
    g
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
