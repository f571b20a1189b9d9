//! Dyadic null-control schedules, minimal-norm stage controls, exact modal
//! propagation and observability constants.

mod observe;
mod run;
mod schedule;
mod stage;

pub use observe::{cost_and_constant_fit, obs_constant, obs_constant_in, ObservabilityEstimate, SweepAxis};
pub use run::{run_lr, run_lr_with, telescoping_constant, RunReport, StageRecord, C1_MAX, C1_MIN};
pub use schedule::{make_schedule, LrSchedule, Stage, TAU_FLOOR};
pub use stage::{
    advance, advance_window, stage_control, stage_gramian, stage_gramian_from, window_observation,
    ControlSegment, StageSolution,
};
