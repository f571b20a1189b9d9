//! Modal representation of the state space 𝓗 and its observation operators.

mod gramian;
mod persist;
mod region;
mod state;

pub use gramian::{
    apply_b, gram_matrix, gram_matrix_in, obs_gramian, obs_gramian_in, rayleigh_matrix, rect_in,
    trace_gramian, ModalGramian,
};
pub use persist::write_atomic;
pub use persist::{load_basis, save_basis};
pub use region::{ObservationRegion, Rect};
pub use state::{inner, project, semigroup, StateVector};
