//! Scalar-generic numerical kernels.

mod band;
mod dd;
mod fit;
mod gauss;
mod jacobi;
mod kronrod;
mod roots;

pub use band::{BandLu, BandMatrix};
pub use dd::DoubleDouble;
pub use fit::{fit_line, LineFit};
pub use gauss::GaussRule;
pub use jacobi::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen};
pub use kronrod::{integrate_adaptive, Quadrature};
pub use roots::{bisect, Bisection};

use num_traits::Float;

/// Lossless-enough conversion of an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Float>(x: f64) -> T {
    T::from(x).expect("f64 literal representable in target float")
}
