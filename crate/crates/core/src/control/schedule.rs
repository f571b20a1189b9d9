use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Real;

/// Relative slack before a cutoff counts as exceeding the cap.
const CLIP_SLACK: Real = 1e-12;
/// Stages stop once `τ_k < TAU_FLOOR · T`.
pub const TAU_FLOOR: Real = 1e-4;

/// One dyadic stage: passive for `(1 − ε)τ`, then controlled on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub index: usize,
    pub start: Real,
    pub tau: Real,
    pub passive: Real,
    pub window: (Real, Real),
    /// `(ε τ)^{−(1+γ)}` before clipping.
    pub lambda_raw: Real,
    pub lambda: Real,
    pub clipped: bool,
}

impl Stage {
    pub fn window_length(&self) -> Real {
        self.window.1 - self.window.0
    }

    pub fn end(&self) -> Real {
        self.window.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub horizon: Real,
    pub gamma: Real,
    pub epsilon: Real,
    pub lambda_cap: Real,
    pub stages: Vec<Stage>,
}

impl LrSchedule {
    /// Time left after the last stage, run without control.
    pub fn final_passive(&self) -> Real {
        let end = self.stages.last().map(|s| s.end()).unwrap_or(0.0);
        (self.horizon - end).max(0.0)
    }

    pub fn max_lambda(&self) -> Real {
        self.stages.iter().map(|s| s.lambda).fold(0.0, Real::max)
    }

    /// The first `n` stages only.
    pub fn truncated(&self, n: usize) -> LrSchedule {
        LrSchedule { stages: self.stages[..n.min(self.stages.len())].to_vec(), ..self.clone() }
    }
}

/// Dyadic stages `τ_k = T 2^{−(k+1)}` with cutoffs `Λ_k = (ε τ_k)^{−(1+γ)}`.
///
/// The first stage whose cutoff exceeds `lambda_cap` is emitted clipped and
/// ends the schedule; so does `τ_k < 10⁻⁴ T`.
pub fn make_schedule(horizon: Real, gamma: Real, epsilon: Real, lambda_cap: Real) -> Result<LrSchedule> {
    if !(horizon > 0.0 && horizon <= 1.0) {
        return Err(invalid(format!("T must lie in (0, 1], got {horizon}")));
    }
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(invalid(format!("gamma must exceed 1 (the iteration diverges otherwise), got {gamma}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(lambda_cap > 0.0) || !lambda_cap.is_finite() {
        return Err(invalid(format!("Lambda_cap must be positive and finite, got {lambda_cap}")));
    }
    let mut stages = Vec::new();
    let mut start = 0.0;
    for index in 0.. {
        let tau = horizon * (0.5 as Real).powi(index as i32 + 1);
        if tau < TAU_FLOOR * horizon {
            break;
        }
        let w = epsilon * tau;
        let lambda_raw = w.powf(-(1.0 + gamma));
        let clipped = lambda_raw > lambda_cap * (1.0 + CLIP_SLACK);
        let passive = tau - w;
        stages.push(Stage {
            index,
            start,
            tau,
            passive,
            window: (start + passive, start + tau),
            lambda_raw,
            lambda: if clipped { lambda_cap } else { lambda_raw },
            clipped,
        });
        start += tau;
        if clipped {
            break;
        }
    }
    Ok(LrSchedule { horizon, gamma, epsilon, lambda_cap, stages })
}
