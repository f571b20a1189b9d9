use serde::{Deserialize, Serialize};

use crate::control::{advance_window, stage_control, window_observation, ControlSegment, LrSchedule};
use crate::error::{Error, Result};
use crate::hilbert::{obs_gramian, semigroup, ModalGramian, Rect, StateVector};
use crate::spectral::EigenBasis;
use crate::Real;

/// Per-stage record of a Lebeau–Robbiano run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub index: usize,
    pub tau: Real,
    pub lambda: Real,
    pub clipped: bool,
    /// Modes with `λ ≤ Λ_k`.
    pub controlled_modes: usize,
    /// `‖z‖` at the stage start.
    pub pre_norm: Real,
    /// `‖z‖` at the window start.
    pub window_norm: Real,
    /// `‖z‖` at the stage end.
    pub post_norm: Real,
    /// `‖Π_{Λ_k} z‖` at the stage end.
    pub low_residual: Real,
    pub cost: Real,
    pub cond_estimate: Real,
    pub rank: usize,
    pub threshold_binding: bool,
    /// `∫_window ‖z‖²_{L²(ω)}` along the controlled trajectory.
    pub observation: Real,
    /// `‖e^{−t A} z0‖` at the stage start, along the uncontrolled evolution of `z0`.
    pub free_start_norm: Real,
    /// The same at the stage end.
    pub free_end_norm: Real,
    /// `∫_window ‖e^{−tA} z0‖²_{L²(ω)}`.
    pub free_observation: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schedule: LrSchedule,
    pub reg_threshold: Real,
    pub initial_norm: Real,
    pub stages: Vec<StageRecord>,
    pub segments: Vec<ControlSegment>,
    pub final_state: StateVector,
    pub final_norm: Real,
    pub total_cost: Real,
    pub max_low_residual: Real,
    /// Smallest `C₁` from which on every stage inequality holds along the
    /// uncontrolled evolution of `z0` over the schedule, where consecutive
    /// stage inequalities chain; `None` if there is none below [`C1_MAX`].
    pub c1: Option<Real>,
    /// The same threshold for the controlled trajectory. The controls drive
    /// each stage end far below its start, so this is usually [`C1_MIN`].
    pub c1_controlled: Option<Real>,
    /// `Σ_k √cost_k · ‖M‖^{1/2} · e^{−λ_cut (T − t₁,k)}`: heuristic size of
    /// what the controls push beyond the basis cutoff (diagnostic only).
    pub spill_bound: Real,
}

/// Executes the schedule: passive part, then the minimal-norm control on each window.
pub fn run_lr(
    z0: &StateVector,
    schedule: &LrSchedule,
    basis: &EigenBasis,
    region: &Rect,
    reg_threshold: Real,
) -> Result<RunReport> {
    run_lr_with(z0, schedule, basis, &obs_gramian(basis, region), reg_threshold)
}

/// As [`run_lr`] with an assembled observation Gramian.
pub fn run_lr_with(
    z0: &StateVector,
    schedule: &LrSchedule,
    basis: &EigenBasis,
    gram: &ModalGramian,
    reg_threshold: Real,
) -> Result<RunReport> {
    z0.check_basis(basis)?;
    if let Some(st) = schedule.stages.iter().find(|s| s.lambda > basis.cutoff) {
        return Err(Error::Configuration(format!(
            "stage {} needs Lambda = {} but the basis stops at {}",
            st.index, st.lambda, basis.cutoff
        )));
    }
    let mut z = z0.clone();
    let mut free = z0.clone();
    let mut stages = Vec::with_capacity(schedule.stages.len());
    let mut segments = Vec::with_capacity(schedule.stages.len());
    for st in &schedule.stages {
        let pre_norm = z.norm();
        let at_window = semigroup(basis, &z, st.passive)?;
        let sol = stage_control(basis, gram, &at_window, st.lambda, st.window, reg_threshold)?;
        let end = advance_window(basis, gram, &at_window, &sol.segment)?;
        let observation = window_observation(basis, gram, &at_window, &sol.segment)?;
        let free_window = semigroup(basis, &free, st.passive)?;
        let free_observation = window_observation(basis, gram, &free_window, &ControlSegment::zero(st.window))?;
        let free_start_norm = free.norm();
        free = semigroup(basis, &free_window, st.window.1 - st.window.0)?;
        let n_low = sol.segment.len();
        let low_residual = end.coeffs[..n_low].iter().map(|a| a * a).sum::<Real>().sqrt();
        stages.push(StageRecord {
            index: st.index,
            tau: st.tau,
            lambda: st.lambda,
            clipped: st.clipped,
            controlled_modes: n_low,
            pre_norm,
            window_norm: at_window.norm(),
            post_norm: end.norm(),
            low_residual,
            cost: sol.cost,
            cond_estimate: sol.cond_estimate,
            rank: sol.rank,
            threshold_binding: sol.threshold_binding,
            observation,
            free_start_norm,
            free_end_norm: free.norm(),
            free_observation,
        });
        segments.push(sol.segment);
        z = end;
    }
    let final_state = semigroup(basis, &z, schedule.final_passive())?;
    let final_norm = final_state.norm();
    let total_cost = stages.iter().map(|s| s.cost).sum();
    let max_low_residual = stages.iter().map(|s| s.low_residual).fold(0.0, Real::max);
    let free: Vec<[Real; 3]> =
        stages.iter().map(|s| [s.free_start_norm.powi(2), s.free_end_norm.powi(2), s.free_observation]).collect();
    let controlled: Vec<[Real; 3]> =
        stages.iter().map(|s| [s.pre_norm.powi(2), s.post_norm.powi(2), s.observation]).collect();
    let taus: Vec<Real> = stages.iter().map(|s| s.tau).collect();
    let c1 = telescoping_constant(&taus, &free, schedule.epsilon, schedule.gamma);
    let c1_controlled = telescoping_constant(&taus, &controlled, schedule.epsilon, schedule.gamma);
    let m_norm = gram.m.clone().symmetric_eigenvalues().max().max(0.0);
    let lambda_cut = basis.cutoff;
    let spill_bound = stages
        .iter()
        .zip(&schedule.stages)
        .map(|(r, st)| r.cost.sqrt() * m_norm.sqrt() * (-lambda_cut * (schedule.horizon - st.window.1)).exp())
        .sum();
    Ok(RunReport {
        schedule: schedule.clone(),
        reg_threshold,
        initial_norm: z0.norm(),
        stages,
        segments,
        final_state,
        final_norm,
        total_cost,
        max_low_residual,
        c1,
        c1_controlled,
        spill_bound,
    })
}

/// Search range of the telescoping constant.
pub const C1_MIN: Real = 1e-6;
pub const C1_MAX: Real = 1e6;

/// `ρ(τ) = exp(−3C/(ετ)^γ) / (2C)`.
fn rho(c: Real, tau: Real, epsilon: Real, gamma: Real) -> Real {
    (-3.0 * c / (epsilon * tau).powf(gamma)).exp() / (2.0 * c)
}

fn stage_inequalities_hold(c: Real, taus: &[Real], data: &[[Real; 3]], epsilon: Real, gamma: Real) -> bool {
    taus.iter().zip(data).all(|(&tau, &[start, end, obs])| {
        let lhs = rho(c, tau, epsilon, gamma) * end;
        let rhs = obs + rho(c, 0.5 * tau, epsilon, gamma) * start;
        lhs <= rhs * (1.0 + 1e-12)
    })
}

/// Smallest `C₁ ∈ [C1_MIN, C1_MAX]` such that
/// `ρ(τ_k)‖end_k‖² ≤ obs_k + ρ(τ_k/2)‖start_k‖²` holds for every stage and every
/// constant `≥ C₁`. `data[k] = [‖start_k‖², ‖end_k‖², obs_k]`.
///
/// Returns `Some(C1_MIN)` when nothing fails on the grid and `None` when the
/// largest constant still fails.
pub fn telescoping_constant(taus: &[Real], data: &[[Real; 3]], epsilon: Real, gamma: Real) -> Option<Real> {
    const STEPS: usize = 1200;
    let grid = |i: usize| C1_MIN * (C1_MAX / C1_MIN).powf(i as Real / STEPS as Real);
    let holds = |c: Real| stage_inequalities_hold(c, taus, data, epsilon, gamma);
    if !holds(C1_MAX) {
        return None;
    }
    let Some(fail) = (0..STEPS).rev().find(|&i| !holds(grid(i))) else {
        return Some(C1_MIN);
    };
    let (mut lo, mut hi) = (grid(fail), grid(fail + 1));
    while hi / lo > 1.0 + 1e-12 {
        let mid = (lo * hi).sqrt();
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoping_threshold_is_tight() {
        let taus = [0.5, 0.25];
        let data = [[1.0, 0.9, 1e-3], [0.8, 0.7, 1e-4]];
        let c = telescoping_constant(&taus, &data, 0.5, 1.5).unwrap();
        assert!(stage_inequalities_hold(c, &taus, &data, 0.5, 1.5));
        assert!(!stage_inequalities_hold(c * (1.0 - 1e-9), &taus, &data, 0.5, 1.5));
        assert!(c > C1_MIN);
    }

    #[test]
    fn trivially_satisfied_inequalities() {
        let c = telescoping_constant(&[0.5], &[[1.0, 0.0, 1.0]], 0.5, 1.5);
        assert_eq!(c, Some(C1_MIN));
    }
}
