use num_complex::Complex64;

use super::{linalg, ops, Matrix};
use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
pub const UNITARITY_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator.
///
/// Hermiticity and trace are checked on every validated construction; the
/// eigenvalue-based positivity check only runs when debug assertions are on.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Matrix);

impl DensityMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let herm = m.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::Numeric(format!("state is not Hermitian (error {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Numeric(format!("state trace is {tr}, expected 1")));
        }
        if cfg!(debug_assertions) {
            let min = linalg::hermitian_eigenvalues(&m)[0];
            if min < -PSD_TOL {
                return Err(Error::Numeric(format!("state is not positive semidefinite (min eigenvalue {min:.3e})")));
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is a state by construction (post-measurement
    /// blocks, conjugations of states, partial traces).
    pub(crate) fn from_trusted(m: Matrix) -> Self {
        debug_assert!(m.hermiticity_error() <= HERMITICITY_TOL);
        debug_assert!((m.trace().re - 1.0).abs() <= TRACE_TOL);
        Self(m)
    }

    /// `|v><v|` for a vector, normalized first.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numeric("cannot normalize a zero vector".into()));
        }
        let unit: Vec<Complex64> = v.iter().map(|x| x / norm).collect();
        let mut m = Matrix::outer(&unit);
        m.hermitize();
        Ok(Self(m))
    }

    /// Computational basis state `|b><b|`.
    pub fn basis(dim: usize, b: usize) -> Self {
        Self(Matrix::basis_projector(dim, b))
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(Matrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Qubit count when the dimension is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(ops::kron(&self.0, &other.0))
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Self {
        let mut m = self.0.conjugate_by(u.matrix());
        m.hermitize();
        Self(m)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.0)
    }
}

/// Square matrix with `U^dagger U = I` to within `1e-10` entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(Matrix);

impl UnitaryMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let err = m.unitarity_error();
        if err > UNITARITY_TOL {
            return Err(Error::Numeric(format!("matrix is not unitary (error {err:.3e})")));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is unitary by construction. Not re-checked, even
    /// in debug builds: the Haar sampler calls this once per batch.
    pub(crate) fn from_trusted(m: Matrix) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.matmul(&other.0))
    }
}

pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit_trace() {
        let m = Matrix::from_real_diagonal(&[0.5, 0.6]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Numeric(_))));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Matrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = Matrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(UnitaryMatrix::new(Matrix::from_real_diagonal(&[1.0, 0.5])).is_err());
    }

    #[test]
    fn qubit_count() {
        assert_eq!(DensityMatrix::maximally_mixed(8).num_qubits(), Some(3));
        assert_eq!(DensityMatrix::maximally_mixed(3).num_qubits(), None);
        assert_eq!(DensityMatrix::maximally_mixed(1).num_qubits(), Some(0));
    }
}
