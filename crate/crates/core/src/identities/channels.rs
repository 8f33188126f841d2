//! Measure-and-prepare versus optimal-cloning channels, and the operator
//! lower bound on the post-measurement ensemble derived from them.

use super::report::{CheckParams, CheckReport};
use super::sym::{contract_with_sym, symmetrize};
use crate::cap;
use crate::combinatorics::binomial;
use crate::ensembles::induced_state_of_dim;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::tensor::linalg::hermitian_eigenvalues;
use crate::tensor::ops::{kron, partial_trace_dims};
use crate::tensor::Matrix;

/// Tolerance for the exact channel checks.
pub const EXACT_TOL: f64 = 1e-9;

fn c(n: usize, k: usize) -> f64 {
    binomial(n as u64, k as u64)
}

fn check_input(rho: &Matrix, d: usize, a: usize, b: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("local dimension must be at least 2, got {d}")));
    }
    cap::check_power(d, a + b)?;
    let expected = d.pow(a as u32);
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch { expected, actual: rho.dim() });
    }
    Ok(())
}

/// `E_ψ tr(rho ψ^{⊗a}) ψ^{⊗b}` over Haar `ψ`, computed exactly as
/// `tr_A[(rho ⊗ I) S_{a+b}] / C(d+a+b-1, a+b)`.
pub fn post_measurement_average(rho: &Matrix, d: usize, a: usize, b: usize) -> Result<Matrix> {
    check_input(rho, d, a, b)?;
    Ok(contract_with_sym(rho, a, b, d)?.scale_real(1.0 / c(d + a + b - 1, a + b)))
}

/// `MP_{a→b}(rho) = C(a+d-1, a) E_ψ tr(rho ψ^{⊗a}) ψ^{⊗b}`.
pub fn measure_and_prepare(rho: &Matrix, d: usize, a: usize, b: usize) -> Result<Matrix> {
    Ok(post_measurement_average(rho, d, a, b)?.scale_real(c(a + d - 1, a)))
}

/// `Σ_s [C(a,s) C(d+b-1,b-s) / C(d+a+b-1,b)] Clone_{s→b}(tr_{a-s} rho)` with
/// `Clone_{s→b}(X) = [C(d+s-1,s)/C(d+b-1,b)] S_b (X ⊗ I) S_b`. The partial
/// trace removes the trailing `a - s` copies.
pub fn cloning_decomposition(rho: &Matrix, d: usize, a: usize, b: usize) -> Result<Matrix> {
    check_input(rho, d, a, b)?;
    let dims = vec![d; a];
    let dim_b = d.pow(b as u32);
    let mut inner = Matrix::zeros(dim_b);
    for s in 0..=a.min(b) {
        let weight = c(a, s) * c(d + b - 1, b - s) / c(d + a + b - 1, b) * c(d + s - 1, s) / c(d + b - 1, b);
        let keep: Vec<usize> = (0..s).collect();
        let reduced = partial_trace_dims(rho, &dims, &keep)?;
        let padded = kron(&reduced, &Matrix::identity(d.pow((b - s) as u32)));
        inner = &inner + &padded.scale_real(weight);
    }
    symmetrize(&inner, b, d)
}

/// Seeded random state on `a` copies of `C^d`, projected onto the symmetric
/// subspace and renormalized.
pub fn symmetric_test_state(d: usize, a: usize, rng: &mut StreamRng) -> Result<Matrix> {
    let dim = cap::check_power(d, a)?;
    let raw = induced_state_of_dim(dim, 2, rng).into_matrix();
    let sym = symmetrize(&raw, a, d)?;
    let norm = sym.trace().re;
    if norm <= 0.0 {
        return Err(Error::Numeric("symmetric projection vanished".into()));
    }
    let mut out = sym.scale_real(1.0 / norm);
    out.hermitize();
    Ok(out)
}

/// Max-entry gap between the two sides of the measure-and-prepare / cloning
/// identity. The identity holds for inputs supported on the symmetric
/// subspace.
pub fn check_chiribella(d: usize, a: usize, b: usize, rho: &Matrix) -> Result<CheckReport> {
    let lhs = measure_and_prepare(rho, d, a, b)?;
    let rhs = cloning_decomposition(rho, d, a, b)?;
    let params = CheckParams::new().with("d", d).with("a", a).with("b", b);
    Ok(CheckReport::new("chiribella", params, lhs.max_abs_diff(&rhs), EXACT_TOL, 0))
}

/// Which right-hand side the post-measurement bound is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundForm {
    /// `e^{-ab/d} S_b / (C(a+d-1,a) C(d+b-1,b))`, what the derivation yields.
    Derived,
    /// `e^{-ab/d} S_b / C(d+b-1,b)`, without the `1/C(a+d-1,a)` factor.
    Displayed,
}

impl BoundForm {
    pub fn check_name(self) -> &'static str {
        match self {
            BoundForm::Derived => "mp_bound",
            BoundForm::Displayed => "mp_bound_displayed",
        }
    }

    fn prefactor(self, d: usize, a: usize) -> f64 {
        match self {
            BoundForm::Derived => 1.0 / c(a + d - 1, a),
            BoundForm::Displayed => 1.0,
        }
    }
}

/// Scalar `λ` with bound `= λ S_b`.
pub fn mp_bound_coefficient(form: BoundForm, d: usize, a: usize, b: usize) -> f64 {
    form.prefactor(d, a) * (-((a * b) as f64) / d as f64).exp() / c(d + b - 1, b)
}

/// Residual `-λ_min(E tr(rho ψ^{⊗a}) ψ^{⊗b} - bound)`; passes when the
/// difference is PSD to within `1e-9`.
pub fn check_mp_bound(d: usize, a: usize, b: usize, rho: &Matrix, form: BoundForm) -> Result<CheckReport> {
    let lhs = post_measurement_average(rho, d, a, b)?;
    let lambda = mp_bound_coefficient(form, d, a, b);
    let sym = symmetrize(&Matrix::identity(d.pow(b as u32)), b, d)?;
    let mut gap = &lhs - &sym.scale_real(lambda);
    gap.hermitize();
    let min_eig = hermitian_eigenvalues(&gap).first().copied().unwrap_or(0.0);
    let params = CheckParams::new().with("d", d).with("a", a).with("b", b);
    Ok(CheckReport::new(form.check_name(), params, -min_eig, EXACT_TOL, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::sym_projector;

    fn ket0(d: usize) -> Matrix {
        Matrix::basis_projector(d, 0)
    }

    #[test]
    fn qubit_one_to_one_by_hand() {
        let mp = measure_and_prepare(&ket0(2), 2, 1, 1).unwrap();
        assert!(mp.max_abs_diff(&Matrix::from_real_diagonal(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-14);
        let rhs = cloning_decomposition(&ket0(2), 2, 1, 1).unwrap();
        assert!(mp.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn zero_input_copies_gives_normalized_projector() {
        let one = Matrix::identity(1);
        let avg = post_measurement_average(&one, 3, 0, 2).unwrap();
        let expected = sym_projector(2, 3).unwrap().scale_real(1.0 / 6.0);
        assert!(avg.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn post_measurement_average_has_unit_trace() {
        let mut rng = StreamRng::new(4, 0);
        let rho = symmetric_test_state(3, 2, &mut rng).unwrap();
        let avg = post_measurement_average(&rho, 3, 2, 2).unwrap();
        let norm = 1.0 / c(2 + 3 - 1, 2);
        assert!((avg.trace().re - norm).abs() < 1e-12);
    }

    #[test]
    fn seeded_identity_instances() {
        let mut rng = StreamRng::new(9, 0);
        for &(d, a, b) in &[(2, 1, 2), (3, 2, 1), (2, 3, 2)] {
            let rho = symmetric_test_state(d, a, &mut rng).unwrap();
            let r = check_chiribella(d, a, b, &rho).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn identity_needs_symmetric_input() {
        // Antisymmetric two-qubit singlet: every ψ^{⊗2} misses it entirely.
        let h = 0.5;
        let singlet = Matrix::from_vec(
            4,
            [0.0, 0.0, 0.0, 0.0, 0.0, h, -h, 0.0, 0.0, -h, h, 0.0, 0.0, 0.0, 0.0, 0.0]
                .iter()
                .map(|&x| x.into())
                .collect(),
        )
        .unwrap();
        assert!(measure_and_prepare(&singlet, 2, 2, 1).unwrap().frobenius_norm() < 1e-14);
        assert!(!check_chiribella(2, 2, 1, &singlet).unwrap().passed);
    }

    #[test]
    fn displayed_bound_fails_where_derived_holds() {
        let rho = ket0(2);
        let lhs = post_measurement_average(&rho, 2, 1, 1).unwrap();
        let mut eig = hermitian_eigenvalues(&lhs);
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] - 1.0 / 6.0).abs() < 1e-14 && (eig[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!((mp_bound_coefficient(BoundForm::Derived, 2, 1, 1) - (-0.5f64).exp() / 4.0).abs() < 1e-15);
        assert!(check_mp_bound(2, 1, 1, &rho, BoundForm::Derived).unwrap().passed);
        assert!(!check_mp_bound(2, 1, 1, &rho, BoundForm::Displayed).unwrap().passed);
    }
}
