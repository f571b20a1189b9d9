use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::hilbert::Rect;
use crate::numeric::{lit, GaussRule};
use num_traits::{Float, FloatConst};

use crate::spectral::{EigenBasis, EigenMode, Field, PreciseBasis, Trig};
use crate::Real;

/// `M_{jl} = ∫_ω u^{(j)} · u^{(l)} dx` for one basis and region.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalGramian {
    pub basis_id: u64,
    pub region: Rect,
    pub m: DMatrix<Real>,
}

impl ModalGramian {
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Leading `n × n` block (the modes with the `n` smallest eigenvalues).
    pub fn leading(&self, n: usize) -> DMatrix<Real> {
        self.m.view((0, 0), (n, n)).into_owned()
    }

    /// `∫_ω |Σ a_j u^{(j)}|²`.
    pub fn quadratic_form(&self, a: &[Real]) -> Real {
        let n = a.len().min(self.dim());
        let mut s = 0.0;
        for j in 0..n {
            let mut row = 0.0;
            for l in 0..n {
                row += self.m[(j, l)] * a[l];
            }
            s += a[j] * row;
        }
        s
    }
}

/// One separable contribution: the x₁ factor of `field` differentiated `d1`
/// times, times the x₂ profile differentiated `d2` times.
#[derive(Debug, Clone, Copy)]
struct Term {
    field: Field,
    d1: u32,
    d2: u32,
}

fn separable_matrix(basis: &EigenBasis, rect: &Rect, terms: &[Term]) -> DMatrix<Real> {
    let n = basis.len();
    let rule = GaussRule::legendre(basis.metadata.settings.quadrature_nodes);
    let (nodes, weights) = rule.mapped(rect.x2.0, rect.x2.1);
    // tables[t][j] = sqrt(w_q) · profile(x_q) over the nodes.
    let tables: Vec<Vec<Vec<Real>>> = terms
        .iter()
        .map(|t| {
            basis
                .modes
                .par_iter()
                .map(|m| {
                    nodes
                        .iter()
                        .zip(&weights)
                        .map(|(&x, &w)| w.sqrt() * m.profile_value(t.field, x, t.d2))
                        .collect()
                })
                .collect()
        })
        .collect();
    let trigs: Vec<Vec<Trig>> = terms
        .iter()
        .map(|t| basis.modes.iter().map(|m| m.trig(t.field).derivative_n(t.d1)).collect())
        .collect();
    let rows: Vec<Vec<Real>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (j..n)
                .map(|l| {
                    let mut s = 0.0;
                    for t in 0..terms.len() {
                        let tx = trigs[t][j].product_integral(&trigs[t][l], rect.x1.0, rect.x1.1);
                        if tx == 0.0 {
                            continue;
                        }
                        let a = &tables[t][j];
                        let b = &tables[t][l];
                        let dot: Real = a.iter().zip(b).map(|(p, q)| p * q).sum();
                        s += tx * dot;
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (j, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            m[(j, j + off)] = v;
            m[(j + off, j)] = v;
        }
    }
    m
}

/// Velocity Gramian over a rectangle: closed-form x₁ integrals, Gauss–Legendre in x₂.
pub fn obs_gramian(basis: &EigenBasis, region: &Rect) -> ModalGramian {
    let terms = [Term { field: Field::U1, d1: 0, d2: 0 }, Term { field: Field::U2, d1: 0, d2: 0 }];
    ModalGramian { basis_id: basis.fingerprint(), region: *region, m: separable_matrix(basis, region, &terms) }
}

fn eta_products(basis: &EigenBasis, f: impl Fn(&EigenMode) -> Trig) -> DMatrix<Real> {
    let n = basis.len();
    let trigs: Vec<Trig> = basis.modes.iter().map(&f).collect();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in j..n {
            let v = trigs[j].product_integral(&trigs[l], 0.0, 2.0 * PI)
                * basis.modes[j].eta_trace
                * basis.modes[l].eta_trace;
            m[(j, l)] = v;
            m[(l, j)] = v;
        }
    }
    m
}

/// `N_{jl} = ∫_𝓘 η_j η_l dx₁`.
pub fn trace_gramian(basis: &EigenBasis) -> DMatrix<Real> {
    eta_products(basis, |m| m.eta_trig())
}

/// Full 𝓗 Gram matrix `M(Ω) + N`; the identity for an orthonormal basis.
pub fn gram_matrix(basis: &EigenBasis) -> DMatrix<Real> {
    obs_gramian(basis, &Rect::full_domain()).m + trace_gramian(basis)
}

/// `⟨A₀ w_l, w_j⟩ = −∫_Ω ∇u_j : ∇u_l − ∫_𝓘 η_j′ η_l′`; equals `−diag(λ)`.
pub fn rayleigh_matrix(basis: &EigenBasis) -> DMatrix<Real> {
    let terms = [
        Term { field: Field::U1, d1: 1, d2: 0 },
        Term { field: Field::U1, d1: 0, d2: 1 },
        Term { field: Field::U2, d1: 1, d2: 0 },
        Term { field: Field::U2, d1: 0, d2: 1 },
    ];
    let grad = separable_matrix(basis, &Rect::full_domain(), &terms);
    let eta = eta_products(basis, |m| m.eta_trig().derivative());
    -(grad + eta)
}

/// Velocity Gramian of a [`PreciseBasis`] over `x1 × x2`, row-major `n × n`.
pub fn obs_gramian_in<T: Float + FloatConst + Send + Sync>(
    basis: &PreciseBasis<T>,
    x1: (T, T),
    x2: (T, T),
) -> Vec<T> {
    let n = basis.len();
    let rule = GaussRule::<T>::legendre(basis.quadrature_nodes);
    let (nodes, weights) = rule.mapped(x2.0, x2.1);
    let fields = [Field::U1, Field::U2];
    let tables: Vec<Vec<Vec<T>>> = fields
        .iter()
        .map(|&f| {
            basis
                .modes
                .par_iter()
                .map(|m| nodes.iter().zip(&weights).map(|(&x, &w)| w.sqrt() * m.profile_value(f, x, 0)).collect())
                .collect()
        })
        .collect();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (j..n)
                .map(|l| {
                    let mut s = T::zero();
                    for (t, &f) in fields.iter().enumerate() {
                        let tx = basis.modes[j].trig(f).product_integral_in(&basis.modes[l].trig(f), x1.0, x1.1);
                        if tx.is_zero() {
                            continue;
                        }
                        let dot = tables[t][j].iter().zip(&tables[t][l]).fold(T::zero(), |acc, (p, q)| acc + *p * *q);
                        s = s + tx * dot;
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut m = vec![T::zero(); n * n];
    for (j, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            m[j * n + j + off] = v;
            m[(j + off) * n + j] = v;
        }
    }
    m
}

/// `M(Ω) + N` for a [`PreciseBasis`], row-major.
pub fn gram_matrix_in<T: Float + FloatConst + Send + Sync>(basis: &PreciseBasis<T>) -> Vec<T> {
    let n = basis.len();
    let tau = T::TAU();
    let mut m = obs_gramian_in(basis, (T::zero(), tau), (T::zero(), T::one()));
    let traces: Vec<T> = basis.modes.iter().map(|m| m.eta_trace()).collect();
    for j in 0..n {
        for l in 0..n {
            let tj = basis.modes[j].trig(Field::U2);
            let tl = basis.modes[l].trig(Field::U2);
            if traces[j].is_zero() || traces[l].is_zero() {
                continue;
            }
            m[j * n + l] = m[j * n + l] + tj.product_integral_in(&tl, T::zero(), tau) * traces[j] * traces[l];
        }
    }
    m
}

/// Bounds of a rectangle converted to `T`.
pub fn rect_in<T: Float>(rect: &Rect) -> ((T, T), (T, T)) {
    ((lit(rect.x1.0), lit(rect.x1.1)), (lit(rect.x2.0), lit(rect.x2.1)))
}

/// Modal forcing `M g` of the control `f = Σ_j g_j u^{(j)} 1_ω`, over the full basis.
pub fn apply_b(gramian: &ModalGramian, indices: &[usize], g: &[Real]) -> Result<Vec<Real>> {
    if indices.len() != g.len() {
        return Err(invalid(format!("{} indices for {} control amplitudes", indices.len(), g.len())));
    }
    let n = gramian.dim();
    if let Some(&bad) = indices.iter().find(|&&j| j >= n) {
        return Err(invalid(format!("control index {bad} outside basis of {n} modes")));
    }
    Ok((0..n).map(|l| indices.iter().zip(g).map(|(&j, &c)| gramian.m[(l, j)] * c).sum()).collect())
}
