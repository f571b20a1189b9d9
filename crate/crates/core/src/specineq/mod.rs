//! The cosh-weighted spectral inequality and the augmented elliptic system.

mod augmented;
mod kernel;
mod weighted;

pub use augmented::{augmented_field, residual_augmented, AugmentedField, AugmentedResiduals, SampleGrid};
pub use kernel::Kernel;
pub use weighted::{
    spec_ineq_report, spec_ineq_report_in, weighted_gramian, weighted_gramian_from, weighted_gramian_in,
    SpecIneqRecord, SpecIneqReport,
};
