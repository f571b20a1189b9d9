//! Re-evaluation of a basis in a wider scalar type.
//!
//! Eigenvalues found in double precision are re-bracketed and bisected on
//! the boundary determinant in `T`; the null vector is taken from the
//! adjugate and normalised with a `T`-valued Gauss rule. Modes keep the
//! order, phases and x₁ factors of the source basis.

use num_traits::{Float, FloatConst};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{bisect, lit, GaussRule};
use crate::spectral::profile::{boundary_rows, fundamental, Branch, StreamProfile};
use crate::spectral::{EigenBasis, EigenMode, Field, ModeProfile, Trig};
use crate::Real;

#[derive(Debug, Clone)]
enum Profile<T> {
    Shear { w: T, amplitude: T },
    Stream { rate: T, branch: Branch, c: [T; 4] },
}

#[derive(Debug, Clone)]
pub struct PreciseMode<T> {
    pub k: u32,
    pub lambda: T,
    profile: Profile<T>,
    trig_u1: Trig,
    trig_u2: Trig,
}

/// The leading modes of an [`EigenBasis`], recomputed in `T`.
#[derive(Debug, Clone)]
pub struct PreciseBasis<T> {
    pub basis_id: u64,
    pub modes: Vec<PreciseMode<T>>,
    pub quadrature_nodes: usize,
}

impl<T: Float> PreciseMode<T> {
    /// x₁ factor of a field (identical to the source mode's).
    pub fn trig(&self, field: Field) -> Trig {
        match field {
            Field::U1 => self.trig_u1,
            Field::U2 | Field::P => self.trig_u2,
        }
    }

    fn phi(&self, x: T, order: u32) -> T {
        match &self.profile {
            Profile::Shear { .. } => T::zero(),
            Profile::Stream { rate, branch, c } => {
                let f = fundamental(self.k, *rate, *branch, x, order);
                f.iter().zip(c).fold(T::zero(), |acc, (a, b)| acc + *a * *b)
            }
        }
    }

    /// `order`-th x₂-derivative of the x₂ factor of a field.
    pub fn profile_value(&self, field: Field, x2: T, order: u32) -> T {
        match &self.profile {
            Profile::Shear { w, amplitude } => match field {
                Field::U1 => {
                    let (s, c) = (*w * x2).sin_cos();
                    let d = match order % 4 {
                        0 => s,
                        1 => c,
                        2 => -s,
                        _ => -c,
                    };
                    *amplitude * w.powi(order as i32) * d
                }
                Field::U2 | Field::P => T::zero(),
            },
            Profile::Stream { .. } => {
                let kf = lit::<T>(self.k as f64);
                match field {
                    Field::U1 => self.phi(x2, order + 1) / kf,
                    Field::U2 => self.phi(x2, order),
                    Field::P => {
                        (self.phi(x2, order + 3) + (self.lambda - kf * kf) * self.phi(x2, order + 1))
                            / (kf * kf)
                    }
                }
            }
        }
    }

    /// Amplitude of `η`.
    pub fn eta_trace(&self) -> T {
        self.phi(T::one(), 0)
    }
}

impl<T: Float + FloatConst + Send + Sync> PreciseBasis<T> {
    /// Recomputes the first `count` modes of `basis` in `T`.
    pub fn refine(basis: &EigenBasis, count: usize) -> Result<Self> {
        let count = count.min(basis.len());
        let nodes = basis.metadata.settings.quadrature_nodes;
        let rule = GaussRule::<T>::legendre(nodes);
        let modes = basis.modes[..count]
            .par_iter()
            .map(|m| refine_mode(m, &rule))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreciseBasis { basis_id: basis.fingerprint(), modes, quadrature_nodes: nodes })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Number of leading modes with `λ ≤ lambda`.
    pub fn count_below(&self, lambda: T) -> usize {
        self.modes.iter().take_while(|m| m.lambda <= lambda).count()
    }
}

fn refine_mode<T: Float + FloatConst>(mode: &EigenMode, rule: &GaussRule<T>) -> Result<PreciseMode<T>> {
    let trig_u1 = mode.trig(Field::U1);
    let trig_u2 = mode.trig(Field::U2);
    match &mode.profile {
        ModeProfile::Shear { n, .. } => {
            let w = lit::<T>(*n as f64) * T::PI();
            Ok(PreciseMode {
                k: 0,
                lambda: w * w,
                profile: Profile::Shear { w, amplitude: T::PI().sqrt().recip() },
                trig_u1,
                trig_u2,
            })
        }
        ModeProfile::Stream(sp) => refine_stream(sp, rule, trig_u1, trig_u2),
    }
}

fn rate_of<T: Float>(k: u32, lambda: T, branch: Branch) -> T {
    let kf = lit::<T>(k as f64);
    let d = lambda - kf * kf;
    match branch {
        Branch::Oscillatory => d.sqrt(),
        Branch::Evanescent => (-d).sqrt(),
        Branch::Degenerate => T::zero(),
    }
}

fn refine_stream<T: Float + FloatConst>(
    sp: &StreamProfile,
    rule: &GaussRule<T>,
    trig_u1: Trig,
    trig_u2: Trig,
) -> Result<PreciseMode<T>> {
    let k = sp.k;
    let branch = sp.branch;
    let det_at = |l: T| det4(&boundary_rows(k, l, rate_of(k, l, branch), branch));
    let l0 = lit::<T>(sp.lambda);
    let mut delta = l0 * lit(2f64.powi(-40));
    let limit = l0 * lit(1e-6);
    let (lo, hi, f_lo) = loop {
        let (lo, hi) = (l0 - delta, l0 + delta);
        let (f_lo, f_hi) = (det_at(lo), det_at(hi));
        if f_lo.signum() != f_hi.signum() && !f_lo.is_zero() && !f_hi.is_zero() {
            break (lo, hi, f_lo);
        }
        if delta > limit {
            let residual = f_lo.abs().to_f64().unwrap_or(Real::NAN);
            return Err(Error::NotAnEigenvalue { k, lambda: sp.lambda, residual });
        }
        delta = delta * lit(4.0);
    };
    let eps = T::epsilon();
    let b = bisect(|l| Ok::<T, Error>(det_at(l)), lo, hi, f_lo, eps * lit(8.0))?;
    let lambda = b.midpoint();
    let rate = rate_of(k, lambda, branch);
    let rows = boundary_rows(k, lambda, rate, branch);
    let mut c = null_vector(&rows);
    // Orient like the double-precision coefficients.
    let dot = (0..4).fold(T::zero(), |acc, i| acc + c[i] * lit(sp.c[i]));
    if dot < T::zero() {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    let kf = lit::<T>(k as f64);
    let raw = |x: T, order: u32| {
        let f = fundamental(k, rate, branch, x, order);
        f.iter().zip(&c).fold(T::zero(), |acc, (a, b)| acc + *a * *b)
    };
    let interior = rule.integrate(T::zero(), T::one(), |x| {
        let d = raw(x, 1) / kf;
        let v = raw(x, 0);
        d * d + v * v
    });
    let top = raw(T::one(), 0);
    let scale = (T::PI() * (interior + top * top)).sqrt().recip();
    c.iter_mut().for_each(|v| *v = *v * scale);
    Ok(PreciseMode { k, lambda, profile: Profile::Stream { rate, branch, c }, trig_u1, trig_u2 })
}

fn det3<T: Float>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn minor<T: Float>(a: &[[T; 4]; 4], row: usize, col: usize) -> T {
    let mut m = [[T::zero(); 3]; 3];
    for (ri, r) in (0..4).filter(|&r| r != row).enumerate() {
        for (ci, c) in (0..4).filter(|&c| c != col).enumerate() {
            m[ri][ci] = a[r][c];
        }
    }
    det3(m)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det4<T: Float>(a: &[[T; 4]; 4]) -> T {
    let mut m = *a;
    let mut det = T::one();
    for col in 0..4 {
        let mut p = col;
        for r in (col + 1)..4 {
            if m[r][col].abs() > m[p][col].abs() {
                p = r;
            }
        }
        if m[p][col].is_zero() {
            return T::zero();
        }
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det = det * m[col][col];
        for r in (col + 1)..4 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                m[r][c] = m[r][c] - f * m[col][c];
            }
        }
    }
    det
}

/// Right null vector of a rank-3 matrix: the largest cofactor row, unit length.
fn null_vector<T: Float>(a: &[[T; 4]; 4]) -> [T; 4] {
    let mut best = [T::zero(); 4];
    let mut best_norm = -T::one();
    for row in 0..4 {
        let mut v = [T::zero(); 4];
        for (col, slot) in v.iter_mut().enumerate() {
            let sign = if (row + col) % 2 == 0 { T::one() } else { -T::one() };
            *slot = sign * minor(a, row, col);
        }
        let norm = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        if norm > best_norm {
            best_norm = norm;
            best = v;
        }
    }
    best.iter_mut().for_each(|x| *x = *x / best_norm);
    best
}
