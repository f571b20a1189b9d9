//! Spectral analysis and null-control synthesis for a viscous incompressible
//! fluid in the periodic strip `Ω = 𝕋 × (0, 1)` whose upper wall carries a
//! heat-type boundary equation.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`] holds scalar-generic kernels (Gauss rules, adaptive
//!   Gauss–Kronrod, cyclic Jacobi, banded LU, bisection, line fits).
//! * [`spectral`] computes the eigenpairs of the coupled Stokes–heat operator
//!   one Fourier sector at a time, and an independent finite-difference
//!   oracle used to validate them.
//! * [`hilbert`] represents states modally, applies the semigroup, the
//!   spectral projection and the control operator, assembles observation
//!   Gramians and persists bases.
//! * [`specineq`] checks the cosh-weighted spectral inequality and the
//!   augmented elliptic system built from eigenfunction sums.
//! * [`control`] builds dyadic control schedules, synthesises minimal-norm
//!   stage controls, propagates the controlled system exactly and estimates
//!   observability constants.
//!
//! Numerical kernels are generic over [`num_traits::Float`]; the physical
//! layers are instantiated with [`Real`].

pub mod control;
pub mod error;
pub mod hilbert;
pub mod numeric;
pub mod specineq;
pub mod spectral;

pub use error::{Error, LoadError, Result};

/// Scalar type used by the spectral and control layers.
pub type Real = f64;

/// Extended-precision scalar (about 32 significant digits) used where
/// double precision cannot resolve the quantity being measured.
pub type Extended = numeric::DoubleDouble;

pub type GaussRule = numeric::GaussRule<Real>;
pub type SymmetricEigen = numeric::SymmetricEigen<Real>;
pub type BandLu = numeric::BandLu<Real>;
pub type LineFit = numeric::LineFit<Real>;

pub use control::{
    advance, cost_and_constant_fit, make_schedule, obs_constant, run_lr, stage_control,
    stage_gramian, ControlSegment, LrSchedule, ObservabilityEstimate, RunReport, Stage,
    StageRecord,
};
pub use hilbert::{
    apply_b, inner, load_basis, obs_gramian, project, save_basis, semigroup, ModalGramian,
    ObservationRegion, Rect, StateVector,
};
pub use specineq::{
    augmented_field, residual_augmented, spec_ineq_report, weighted_gramian, AugmentedField,
    Kernel, SpecIneqReport,
};
pub use spectral::{
    assemble_basis, bracket_roots, build_mode, dispersion, eval_mode, oracle_eigs, refine_root,
    zero_mode, Branch, EigenBasis, EigenMode, ModeValue, Phase, PreciseBasis, SpectralSettings,
    StreamProfile,
};
