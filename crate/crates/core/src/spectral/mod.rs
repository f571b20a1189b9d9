//! Eigenpairs of the coupled operator, one Fourier sector at a time.

mod basis;
mod dispersion;
mod mode;
mod oracle;
mod precise;
mod profile;

pub use basis::{
    assemble_basis, assemble_basis_with, default_k_max, sector_eigenvalues, BasisMetadata,
    EigenBasis, SpectralSettings, BASIS_SCHEMA_VERSION,
};
pub(crate) use basis::mode_order;
pub use dispersion::{
    bracket_roots, bracket_roots_with, dispersion, dispersion_with, refine_root, refine_root_with,
    DEFAULT_DEGENERACY_REL,
};
pub use mode::{
    build_mode, build_mode_with, eval_mode, mode_residuals, zero_mode, EigenMode, Field,
    ModeProfile, ModeResiduals, ModeValue, Phase, Trig, TrigKind,
};
pub use oracle::{fd_eigenvalues, oracle_eigs, OracleEigenvalue};
pub use precise::{PreciseBasis, PreciseMode};
pub use profile::{Branch, StreamProfile};
