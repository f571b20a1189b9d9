use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::control::Stage;
use crate::error::{invalid, Error, Result};
use crate::hilbert::{obs_gramian, semigroup, ModalGramian, Rect, StateVector};
use crate::spectral::EigenBasis;
use crate::Real;

/// `∫₀^w e^{−s t} dt = −expm1(−s w)/s`.
pub(crate) fn decay_integral(s: Real, w: Real) -> Real {
    if s == 0.0 {
        w
    } else {
        -(-s * w).exp_m1() / s
    }
}

/// `∫₀^w e^{−a t} e^{−b (w − t)} dt`.
fn cross_integral(a: Real, b: Real, w: Real) -> Real {
    (-a.min(b) * w).exp() * decay_integral((a - b).abs(), w)
}

fn check_gramian(basis: &EigenBasis, gram: &ModalGramian) -> Result<()> {
    if gram.basis_id != basis.fingerprint() || gram.dim() != basis.len() {
        return Err(Error::BasisMismatch(format!(
            "Gramian of basis {:016x} ({} modes) used with basis {:016x} ({} modes)",
            gram.basis_id,
            gram.dim(),
            basis.fingerprint(),
            basis.len()
        )));
    }
    Ok(())
}

/// `G_{jl} = M_{jl} (1 − e^{−(λ_j+λ_l)w})/(λ_j+λ_l)` over the modes with `λ ≤ lambda`.
pub fn stage_gramian(basis: &EigenBasis, lambda: Real, region: &Rect, w: Real) -> Result<DMatrix<Real>> {
    stage_gramian_from(basis, &obs_gramian(basis, region), lambda, w)
}

/// As [`stage_gramian`], reusing an assembled observation Gramian.
pub fn stage_gramian_from(basis: &EigenBasis, gram: &ModalGramian, lambda: Real, w: Real) -> Result<DMatrix<Real>> {
    check_gramian(basis, gram)?;
    if !(w > 0.0) || !w.is_finite() {
        return Err(invalid(format!("window length must be positive, got {w}")));
    }
    if lambda > basis.cutoff {
        return Err(Error::Configuration(format!("Lambda = {lambda} exceeds basis cutoff {}", basis.cutoff)));
    }
    let n = basis.count_below(lambda);
    let lam: Vec<Real> = basis.modes[..n].iter().map(|m| m.lambda).collect();
    Ok(DMatrix::from_fn(n, n, |j, l| gram.m[(j, l)] * decay_integral(lam[j] + lam[l], w)))
}

/// Control on one window: `g_j(t) = −c_j e^{−λ_j (t₁ − t)}` for the modes `0..c.len()`,
/// acting through `f = Σ_j g_j u^{(j)} 1_ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub window: (Real, Real),
    pub coeffs: Vec<Real>,
}

impl ControlSegment {
    pub fn zero(window: (Real, Real)) -> Self {
        ControlSegment { window, coeffs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Modal amplitudes `g_j(t)`; zero outside the window.
    pub fn amplitudes(&self, basis: &EigenBasis, t: Real) -> Vec<Real> {
        let (t0, t1) = self.window;
        if t < t0 || t > t1 {
            return vec![0.0; self.coeffs.len()];
        }
        self.coeffs.iter().zip(&basis.modes).map(|(c, m)| -c * (-m.lambda * (t1 - t)).exp()).collect()
    }
}

/// Outcome of the minimal-norm stage solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSolution {
    pub segment: ControlSegment,
    /// `‖μ‖` with `μ = Π_Λ e^{−wA} z`.
    pub target_norm: Real,
    /// `‖μ − G G⁺ μ‖`: the low-mode block left at the window end.
    pub residual: Real,
    /// `μᵀ G⁺ μ = ∫ ‖f‖²_{L²(ω)}`.
    pub cost: Real,
    /// `λ_max(G) / λ_min(G)`, infinite when `G` is numerically singular.
    pub cond_estimate: Real,
    /// Eigenvalues of `G` kept by the pseudo-inverse.
    pub rank: usize,
    /// Whether the threshold discarded any eigenvalue of `G`.
    pub threshold_binding: bool,
}

/// Minimal-norm control steering the modes with `λ ≤ lambda` to zero at the
/// end of `window`, from `state` at the window start.
///
/// `c = G⁺μ` with the eigenvalue pseudo-inverse that drops eigenvalues below
/// `reg_threshold · λ_max(G)`.
pub fn stage_control(
    basis: &EigenBasis,
    gram: &ModalGramian,
    state: &StateVector,
    lambda: Real,
    window: (Real, Real),
    reg_threshold: Real,
) -> Result<StageSolution> {
    state.check_basis(basis)?;
    if !(reg_threshold >= 0.0 && reg_threshold < 1.0) {
        return Err(invalid(format!("pseudo-inverse threshold must lie in [0, 1), got {reg_threshold}")));
    }
    let w = window.1 - window.0;
    let g = stage_gramian_from(basis, gram, lambda, w)?;
    let n = g.nrows();
    let mu = DVector::from_fn(n, |j, _| state.coeffs[j] * (-basis.modes[j].lambda * w).exp());
    let target_norm = mu.norm();
    if n == 0 || target_norm == 0.0 {
        return Ok(StageSolution {
            segment: ControlSegment { window, coeffs: vec![0.0; n] },
            target_norm,
            residual: 0.0,
            cost: 0.0,
            cond_estimate: if n == 0 { 1.0 } else { condition(&g) },
            rank: n,
            threshold_binding: false,
        });
    }
    let eig = g.clone().symmetric_eigen();
    let top = eig.eigenvalues.max();
    let bottom = eig.eigenvalues.min();
    let cut = reg_threshold * top;
    let mut c = DVector::zeros(n);
    let mut cost = 0.0;
    let mut rank = 0;
    // Fixed summation order keeps the result independent of threading.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    for i in order {
        let e = eig.eigenvalues[i];
        if e <= cut || e <= 0.0 {
            continue;
        }
        rank += 1;
        let v = eig.eigenvectors.column(i);
        let p = v.dot(&mu);
        c.axpy(p / e, &v, 1.0);
        cost += p * p / e;
    }
    let residual = (&mu - &g * &c).norm();
    Ok(StageSolution {
        segment: ControlSegment { window, coeffs: c.iter().copied().collect() },
        target_norm,
        residual,
        cost,
        cond_estimate: if bottom > 0.0 { top / bottom } else { Real::INFINITY },
        rank,
        threshold_binding: rank < n,
    })
}

fn condition(g: &DMatrix<Real>) -> Real {
    let e = g.clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = (e.min(), e.max());
    if lo > 0.0 {
        hi / lo
    } else {
        Real::INFINITY
    }
}

/// Exact propagation across one controlled window: state at the window start
/// to the state at its end, every basis mode forced through `M`.
pub fn advance_window(
    basis: &EigenBasis,
    gram: &ModalGramian,
    state: &StateVector,
    segment: &ControlSegment,
) -> Result<StateVector> {
    state.check_basis(basis)?;
    check_gramian(basis, gram)?;
    let w = segment.window.1 - segment.window.0;
    if !(w >= 0.0) {
        return Err(invalid("control window ends before it starts"));
    }
    let nl = segment.len();
    if nl > basis.len() {
        return Err(invalid(format!("control on {nl} modes exceeds basis of {}", basis.len())));
    }
    let lam = basis.lambdas();
    let coeffs = (0..basis.len())
        .map(|l| {
            let forced: Real = (0..nl)
                .map(|j| gram.m[(l, j)] * segment.coeffs[j] * decay_integral(lam[j] + lam[l], w))
                .sum();
            (-lam[l] * w).exp() * state.coeffs[l] - forced
        })
        .collect();
    Ok(StateVector { basis_id: state.basis_id, coeffs })
}

/// Exact propagation across a whole stage: passive part, then the window.
pub fn advance(
    basis: &EigenBasis,
    gram: &ModalGramian,
    state: &StateVector,
    stage: &Stage,
    segment: &ControlSegment,
) -> Result<StateVector> {
    let at_window = semigroup(basis, state, stage.passive)?;
    advance_window(basis, gram, &at_window, segment)
}

/// `∫_window ‖z(t)‖²_{L²(ω)}` along the controlled trajectory started from
/// `state` at the window start, in closed form.
///
/// With `R_{lj} = M_{lj} c_j/(λ_l+λ_j)` the trajectory is
/// `a_l(t) = e^{−λ_l t} P_l − Σ_j R_{lj} e^{−λ_j (w−t)}`, `P_l = a_l(0) + Σ_j R_{lj} e^{−λ_j w}`.
pub fn window_observation(
    basis: &EigenBasis,
    gram: &ModalGramian,
    state: &StateVector,
    segment: &ControlSegment,
) -> Result<Real> {
    state.check_basis(basis)?;
    check_gramian(basis, gram)?;
    let w = segment.window.1 - segment.window.0;
    let n = basis.len();
    let nl = segment.len();
    let lam = basis.lambdas();
    let m = &gram.m;
    let r = DMatrix::from_fn(n, nl, |l, j| m[(l, j)] * segment.coeffs[j] / (lam[l] + lam[j]));
    let p: Vec<Real> = (0..n)
        .map(|l| state.coeffs[l] + (0..nl).map(|j| r[(l, j)] * (-lam[j] * w).exp()).sum::<Real>())
        .collect();
    let mut free = 0.0;
    for l in 0..n {
        let mut row = 0.0;
        for q in 0..n {
            row += m[(l, q)] * p[q] * decay_integral(lam[l] + lam[q], w);
        }
        free += p[l] * row;
    }
    if nl == 0 {
        return Ok(free);
    }
    let mr = m * &r;
    let mut cross = 0.0;
    for l in 0..n {
        for j in 0..nl {
            cross += p[l] * mr[(l, j)] * cross_integral(lam[l], lam[j], w);
        }
    }
    let rmr = r.transpose() * &mr;
    let mut forced = 0.0;
    for j in 0..nl {
        for i in 0..nl {
            forced += rmr[(j, i)] * decay_integral(lam[j] + lam[i], w);
        }
    }
    Ok(free - 2.0 * cross + forced)
}
