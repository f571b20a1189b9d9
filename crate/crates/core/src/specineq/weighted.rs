use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use num_traits::{Float, FloatConst};

use crate::hilbert::{obs_gramian, obs_gramian_in, rect_in, ModalGramian, Rect};
use crate::numeric::{fit_line, lit, symmetric_eigenvalues, LineFit};
use crate::spectral::{EigenBasis, PreciseBasis};
use crate::specineq::Kernel;
use crate::{Extended, Real};

/// `K_{jl} = M_{jl} ∫ κ² cosh(s√λ_j) cosh(s√λ_l) ds` over the modes with `λ ≤ lambda`.
pub fn weighted_gramian(basis: &EigenBasis, lambda: Real, region: &Rect, kernel: &Kernel) -> Result<DMatrix<Real>> {
    let gram = obs_gramian(basis, region);
    weighted_gramian_from(basis, lambda, &gram, kernel)
}

/// As [`weighted_gramian`], reusing an assembled observation Gramian.
pub fn weighted_gramian_from(
    basis: &EigenBasis,
    lambda: Real,
    gram: &ModalGramian,
    kernel: &Kernel,
) -> Result<DMatrix<Real>> {
    if lambda > basis.cutoff {
        return Err(invalid(format!("Lambda = {lambda} exceeds basis cutoff {}", basis.cutoff)));
    }
    let n = basis.count_below(lambda);
    let roots: Vec<Real> = basis.modes[..n].iter().map(|m| m.lambda.sqrt()).collect();
    let rows: Vec<Vec<Real>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (j..n)
                .map(|l| {
                    let w = 0.5
                        * (kernel.cosh_moment(roots[j] + roots[l])
                            + kernel.cosh_moment(roots[j] - roots[l]));
                    gram.m[(j, l)] * w
                })
                .collect()
        })
        .collect();
    let mut k = DMatrix::zeros(n, n);
    for (j, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            k[(j, j + off)] = v;
            k[(j + off, j)] = v;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecIneqRecord {
    pub lambda: Real,
    pub dim: usize,
    pub min_eig: Real,
    pub trace: Real,
    /// `−log(min_eig)/√Λ`: the constant for which `min_eig = e^{−C√Λ}`.
    pub implied_constant: Real,
    /// `∫κ² · min-eig(M restricted to λ ≤ Λ)`, a lower bound for `min_eig`.
    pub cosh_lower_bound: Real,
    /// `min_eig ≤ −1e−10 · trace`.
    pub violation: bool,
}

impl SpecIneqRecord {
    pub fn log_min_eig(&self) -> Real {
        self.min_eig.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecIneqReport {
    pub records: Vec<SpecIneqRecord>,
    /// Least squares of `−log(min_eig)` against `√Λ`; slope is the fitted constant.
    pub fit: Option<LineFit<Real>>,
}

impl SpecIneqReport {
    pub fn all_positive(&self) -> bool {
        self.records.iter().all(|r| r.min_eig > 0.0)
    }
}

/// Tanh-sinh nodes on the kernel support with `κ²` folded into the weights.
#[derive(Debug, Clone)]
pub(crate) struct KernelRule<T> {
    pub s: Vec<T>,
    /// `log(w_q κ(s_q)²)`.
    pub log_w: Vec<T>,
}

fn log_cosh_in<T: Float + FloatConst>(x: T) -> T {
    let x = x.abs();
    x + (lit::<T>(-2.0) * x).exp().ln_1p() - T::LN_2()
}

impl<T: Float + FloatConst> KernelRule<T> {
    /// Step `h` in the tanh-sinh variable; nodes whose `κ²` is below `e^{-400}` are dropped.
    pub fn tanh_sinh(kernel: &Kernel, h: T) -> Self {
        let (a, b) = (lit::<T>(kernel.support.0), lit::<T>(kernel.support.1));
        let half = (b - a) / lit(2.0);
        let width = b - a;
        let two = lit::<T>(2.0);
        let half_pi = T::FRAC_PI_2();
        let floor = lit::<T>(-400.0);
        let mut s = Vec::new();
        let mut log_w = Vec::new();
        let mut i = 0i64;
        loop {
            let t = lit::<T>(i as f64) * h;
            let u = half_pi * t.sinh();
            // 1 − tanh u and 1 + tanh u without cancellation.
            let right = two / ((two * u).exp() + T::one());
            let left = two / ((-two * u).exp() + T::one());
            let (da, db) = (half * left, half * right);
            let log_k2 = two * (-(da * db).recip() + lit::<T>(4.0) / (width * width));
            if log_k2 < floor {
                break;
            }
            let lw = (half * h * half_pi * t.cosh()).ln() - two * log_cosh_in(u) + log_k2;
            s.push(a + da);
            log_w.push(lw);
            if i > 0 {
                // Mirror node: the distances swap.
                s.push(a + db);
                log_w.push(lw);
            }
            i += 1;
        }
        KernelRule { s, log_w }
    }

    /// `∫ κ² cosh(c s) ds`.
    pub fn cosh_moment(&self, c: T) -> T {
        self.s
            .iter()
            .zip(&self.log_w)
            .fold(T::zero(), |acc, (&s, &lw)| acc + (lw + log_cosh_in(c * s)).exp())
    }

    /// Halves `h` from `1/8` until the moments at `c = 0` and `c = c_max`
    /// change by less than `64 ε` relative (at most down to `h = 2⁻¹⁰`).
    pub fn converged(kernel: &Kernel, c_max: T) -> Self {
        let tol = T::epsilon() * lit(64.0);
        let mut h = lit::<T>(0.125);
        let mut rule = Self::tanh_sinh(kernel, h);
        for _ in 0..7 {
            let finer = Self::tanh_sinh(kernel, h / lit(2.0));
            let settled = [T::zero(), c_max].iter().all(|&c| {
                let (p, q) = (rule.cosh_moment(c), finer.cosh_moment(c));
                (p - q).abs() <= tol * q.abs()
            });
            rule = finer;
            h = h / lit(2.0);
            if settled {
                break;
            }
        }
        rule
    }
}

/// `K` for the leading `dim` modes of a [`PreciseBasis`], given its
/// row-major Gramian `m` (of size `basis.len()`), row-major `dim × dim`.
pub fn weighted_gramian_in<T: Float + FloatConst + Send + Sync>(
    basis: &PreciseBasis<T>,
    m: &[T],
    dim: usize,
    kernel: &Kernel,
) -> Vec<T> {
    let n = basis.len();
    assert_eq!(m.len(), n * n, "Gramian does not match the basis");
    let dim = dim.min(n);
    if dim == 0 {
        return Vec::new();
    }
    let roots: Vec<T> = basis.modes[..dim].iter().map(|m| m.lambda.sqrt()).collect();
    let rule = KernelRule::converged(kernel, lit::<T>(2.0) * roots[dim - 1]);
    // e[j][q] = sqrt(w_q) κ(s_q) cosh(√λ_j s_q), assembled in log space.
    let e: Vec<Vec<T>> = roots
        .par_iter()
        .map(|&r| {
            rule.s
                .iter()
                .zip(&rule.log_w)
                .map(|(&s, &lw)| (lw / lit(2.0) + log_cosh_in(r * s)).exp())
                .collect()
        })
        .collect();
    let rows: Vec<Vec<T>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            (j..dim)
                .map(|l| {
                    let w = e[j].iter().zip(&e[l]).fold(T::zero(), |acc, (p, q)| acc + *p * *q);
                    m[j * n + l] * w
                })
                .collect()
        })
        .collect();
    let mut k = vec![T::zero(); dim * dim];
    for (j, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            k[j * dim + j + off] = v;
            k[(j + off) * dim + j] = v;
        }
    }
    k
}

/// Min-eigenvalue of `K(Λ)` for each cutoff and the `e^{C√Λ}` fit.
///
/// The matrices are assembled and diagonalised in [`Extended`] precision:
/// `min-eig(K)` falls below `ε · ‖K‖` in double precision once `Λ ≳ 100`.
pub fn spec_ineq_report(
    basis: &EigenBasis,
    lambda_list: &[Real],
    region: &Rect,
    kernel: &Kernel,
) -> Result<SpecIneqReport> {
    spec_ineq_report_in::<Extended>(basis, lambda_list, region, kernel)
}

/// [`spec_ineq_report`] carried out in the scalar type `T`.
pub fn spec_ineq_report_in<T: Float + FloatConst + Send + Sync>(
    basis: &EigenBasis,
    lambda_list: &[Real],
    region: &Rect,
    kernel: &Kernel,
) -> Result<SpecIneqReport> {
    let usable = lambda_list.iter().filter(|&&l| basis.count_below(l) > 0).count();
    if usable < 3 {
        return Err(invalid(format!("need at least 3 cutoffs with nonempty mode sets, got {usable}")));
    }
    if let Some(&bad) = lambda_list.iter().find(|&&l| l > basis.cutoff) {
        return Err(invalid(format!("Lambda = {bad} exceeds basis cutoff {}", basis.cutoff)));
    }
    let n_max = lambda_list.iter().map(|&l| basis.count_below(l)).max().unwrap_or(0);
    let precise = PreciseBasis::<T>::refine(basis, n_max)?;
    let (x1, x2) = rect_in::<T>(region);
    let gram = obs_gramian_in(&precise, x1, x2);
    let kappa_l2 = kernel.l2_squared();
    let mut records = Vec::with_capacity(lambda_list.len());
    for &lambda in lambda_list {
        let dim = basis.count_below(lambda);
        if dim == 0 {
            continue;
        }
        let k = weighted_gramian_in(&precise, &gram, dim, kernel);
        let min_eig = symmetric_eigenvalues(&k, dim)[0];
        let mut m_lead = vec![T::zero(); dim * dim];
        for j in 0..dim {
            m_lead[j * dim..(j + 1) * dim].copy_from_slice(&gram[j * n_max..j * n_max + dim]);
        }
        let m_min = symmetric_eigenvalues(&m_lead, dim)[0];
        let trace = (0..dim).fold(T::zero(), |acc, j| acc + k[j * dim + j]);
        let as_real = |v: T| v.to_f64().unwrap_or(Real::NAN);
        let (min_eig, trace) = (as_real(min_eig), as_real(trace));
        records.push(SpecIneqRecord {
            lambda,
            dim,
            min_eig,
            trace,
            implied_constant: -min_eig.ln() / lambda.sqrt(),
            cosh_lower_bound: kappa_l2 * as_real(m_min),
            violation: min_eig <= -1e-10 * trace,
        });
    }
    let positive: Vec<&SpecIneqRecord> = records.iter().filter(|r| r.min_eig > 0.0).collect();
    let xs: Vec<Real> = positive.iter().map(|r| r.lambda.sqrt()).collect();
    let ys: Vec<Real> = positive.iter().map(|r| -r.min_eig.ln()).collect();
    let fit = if positive.len() >= 2 { fit_line(&xs, &ys) } else { None };
    Ok(SpecIneqReport { records, fit })
}
