use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::EigenBasis;
use crate::Real;

/// Element of 𝓗 in modal coordinates of one basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    /// [`EigenBasis::fingerprint`] of the basis the coefficients refer to.
    pub basis_id: u64,
    pub coeffs: Vec<Real>,
}

impl StateVector {
    pub fn zeros(basis: &EigenBasis) -> Self {
        StateVector { basis_id: basis.fingerprint(), coeffs: vec![0.0; basis.len()] }
    }

    /// The basis vector `w_j`.
    pub fn unit(basis: &EigenBasis, j: usize) -> Result<Self> {
        if j >= basis.len() {
            return Err(invalid(format!("mode index {j} outside basis of {} modes", basis.len())));
        }
        let mut s = Self::zeros(basis);
        s.coeffs[j] = 1.0;
        Ok(s)
    }

    pub fn from_coeffs(basis: &EigenBasis, coeffs: Vec<Real>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} coefficients for a basis of {} modes",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(StateVector { basis_id: basis.fingerprint(), coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm(&self) -> Real {
        self.coeffs.iter().map(|a| a * a).sum::<Real>().sqrt()
    }

    pub fn check_basis(&self, basis: &EigenBasis) -> Result<()> {
        if self.basis_id != basis.fingerprint() || self.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "state refers to basis {:016x} ({} modes), got {:016x} ({} modes)",
                self.basis_id,
                self.len(),
                basis.fingerprint(),
                basis.len()
            )));
        }
        Ok(())
    }

    fn check_pair(&self, other: &StateVector) -> Result<()> {
        if self.basis_id != other.basis_id || self.len() != other.len() {
            return Err(Error::BasisMismatch(format!(
                "states on different bases ({:016x} vs {:016x})",
                self.basis_id, other.basis_id
            )));
        }
        Ok(())
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: Real, other: &StateVector) -> Result<StateVector> {
        self.check_pair(other)?;
        Ok(StateVector {
            basis_id: self.basis_id,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + s * b).collect(),
        })
    }
}

/// 𝓗 inner product.
pub fn inner(x: &StateVector, y: &StateVector) -> Result<Real> {
    x.check_pair(y)?;
    Ok(x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a * b).sum())
}

/// Free evolution `e^{−tA} x`.
pub fn semigroup(basis: &EigenBasis, x: &StateVector, t: Real) -> Result<StateVector> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("semigroup time must be finite and >= 0, got {t}")));
    }
    x.check_basis(basis)?;
    Ok(StateVector {
        basis_id: x.basis_id,
        coeffs: x.coeffs.iter().zip(&basis.modes).map(|(a, m)| a * (-m.lambda * t).exp()).collect(),
    })
}

/// Orthogonal projection onto the modes with `λ ≤ lambda`.
pub fn project(basis: &EigenBasis, x: &StateVector, lambda: Real) -> Result<StateVector> {
    x.check_basis(basis)?;
    Ok(StateVector {
        basis_id: x.basis_id,
        coeffs: x
            .coeffs
            .iter()
            .zip(&basis.modes)
            .map(|(&a, m)| if m.lambda <= lambda { a } else { 0.0 })
            .collect(),
    })
}
