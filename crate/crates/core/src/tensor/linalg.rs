//! Bridges to nalgebra for the dense factorizations: Hermitian
//! eigendecomposition and QR.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Matrix;

fn to_nalgebra(m: &Matrix) -> DMatrix<Complex64> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| m[(i, j)])
}

fn from_nalgebra(m: &DMatrix<Complex64>) -> Matrix {
    Matrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part of the input is used.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut h = m.clone();
    h.hermitize();
    let mut ev: Vec<f64> = to_nalgebra(&h).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenpairs of a Hermitian matrix: `(values, vectors)` with eigenvector `i`
/// stored in column `i`.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let mut h = m.clone();
    h.hermitize();
    let eig = to_nalgebra(&h).symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), from_nalgebra(&eig.eigenvectors))
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V f(Λ) V^dagger`.
pub fn hermitian_function(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let d = m.dim();
    Matrix::from_fn(d, |i, j| (0..d).map(|k| vectors[(i, k)] * f(values[k]) * vectors[(j, k)].conj()).sum())
}

/// Householder QR of a square matrix, returned as `(Q, R)`.
pub fn qr(m: &Matrix) -> (Matrix, Matrix) {
    let qr = to_nalgebra(m).qr();
    (from_nalgebra(&qr.q()), from_nalgebra(&qr.r()))
}

/// Singular values of a square matrix.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    to_nalgebra(m).singular_values().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = Matrix::from_real_diagonal(&[0.5, -1.0, 2.0]);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 0.5).abs() < 1e-12);
        assert!((ev[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn qr_reconstructs_input() {
        let m = Matrix::from_fn(4, |i, j| Complex64::new((i * 3 + j) as f64 % 5.0, (i + 2 * j) as f64 % 3.0 - 1.0));
        let (q, r) = qr(&m);
        assert!(q.unitarity_error() < 1e-12);
        assert!(q.matmul(&r).max_abs_diff(&m) < 1e-12);
        for i in 0..4 {
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn square_root_squares_back() {
        let m = Matrix::from_real_diagonal(&[0.25, 0.75]);
        let s = hermitian_function(&m, f64::sqrt);
        assert!(s.matmul(&s).max_abs_diff(&m) < 1e-12);
    }
}
