//! Exact reference quantities for the protocols and checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{kron, linalg, ops, swap_operator, DensityMatrix, Matrix, SuffixMeasurement, UnitaryMatrix};

/// Imaginary residue above this is reported instead of discarded.
pub const IMAGINARY_TOL: f64 = 1e-10;
const SPECTRAL_FLOOR: f64 = 1e-13;

fn real_part(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::Numeric(format!("{what} has imaginary residue {:.3e}", z.im)));
    }
    Ok(z.re)
}

fn same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: sigma.dim() });
    }
    Ok(())
}

/// `tr(rho sigma)`.
pub fn inner_product(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    real_part(rho.matrix().trace_product(sigma.matrix()), "tr(rho sigma)")
}

/// `tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> Result<f64> {
    inner_product(rho, rho)
}

/// `f_k = tr(tr_{>k}(rho) tr_{>k}(sigma))`, the overlap of the reductions to
/// the first `k` qubits. `f_0 = 1`.
pub fn partial_ip(rho: &DensityMatrix, sigma: &DensityMatrix, k: usize) -> Result<f64> {
    same_dims(rho, sigma)?;
    let a = ops::trace_out_suffix(rho.matrix(), k)?;
    let b = ops::trace_out_suffix(sigma.matrix(), k)?;
    real_part(a.trace_product(&b), "f_k")
}

/// Probability that measuring `rho` and `sigma` in the same rotated basis
/// gives the same outcome: `Σ_b <b|U rho U^dagger|b><b|U sigma U^dagger|b>`.
pub fn alg1_conditional_mean(rho: &DensityMatrix, sigma: &DensityMatrix, u: &UnitaryMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    let p = crate::tensor::born_probabilities(rho, u)?;
    let q = crate::tensor::born_probabilities(sigma, u)?;
    Ok(p.iter().zip(&q).map(|(a, b)| a * b).sum())
}

/// Exact `E[g | U]` for the partial swap protocol, from the conditional
/// prefix states: `Σ_x Pr[x] Pr'[x] tr(rho_x sigma_x)`.
pub fn alg2_conditional_mean(rho: &DensityMatrix, sigma: &DensityMatrix, k: usize, u: &UnitaryMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    let alice = SuffixMeasurement::new(rho, u, k)?;
    let bob = SuffixMeasurement::new(sigma, u, k)?;
    let mut total = 0.0;
    for (x, (&p, &q)) in alice.probabilities().iter().zip(bob.probabilities()).enumerate() {
        if p <= 0.0 || q <= 0.0 {
            continue;
        }
        let overlap = inner_product(&alice.post_state(x)?, &bob.post_state(x)?)?;
        total += p * q * overlap;
    }
    Ok(total)
}

/// The same quantity from the operator form
/// `Σ_b tr((SWAP_k ⊗ (U^dagger|b><b|U)^{⊗2}) · rho ⊗ sigma)`, with the
/// operator laid out on `(A_prefix, B_prefix, A_suffix, B_suffix)`.
pub fn alg2_conditional_mean_operator(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    k: usize,
    u: &UnitaryMatrix,
) -> Result<f64> {
    same_dims(rho, sigma)?;
    let n = rho.num_qubits().ok_or_else(|| Error::InvalidParameter("state is not a qubit register".into()))?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let prefix = 1usize << k;
    let suffix = 1usize << (n - k);
    crate::cap::check_dim(rho.dim() * rho.dim())?;
    // rho ⊗ sigma is ordered (A_p, A_s, B_p, B_s); move to (A_p, B_p, A_s, B_s).
    let joint = kron(rho.matrix(), sigma.matrix());
    let joint = ops::permute_subsystems(&joint, &[prefix, suffix, prefix, suffix], &[0, 2, 1, 3])?;

    let swap = swap_operator(k);
    let u_dag = u.matrix().adjoint();
    let mut projectors = Matrix::zeros(suffix * suffix);
    for b in 0..suffix {
        let proj = Matrix::basis_projector(suffix, b).conjugate_by(&u_dag);
        projectors = &projectors + &kron(&proj, &proj);
    }
    let op = kron(&swap, &projectors);
    real_part(op.trace_product(&joint), "partial swap expectation")
}

/// `½‖rho - sigma‖_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>())
}

/// `‖rho - sigma‖_2` (Frobenius / Hilbert–Schmidt norm).
pub fn hilbert_schmidt_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    Ok((rho.matrix() - sigma.matrix()).frobenius_norm())
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    // Rounding noise on null eigenvalues would otherwise survive the square root.
    let clamp = |x: f64| if x < SPECTRAL_FLOOR { 0.0 } else { x.sqrt() };
    let root = linalg::hermitian_function(rho.matrix(), clamp);
    let inner = root.matmul(sigma.matrix()).matmul(&root);
    let s: f64 = linalg::hermitian_eigenvalues(&inner).into_iter().map(clamp).sum();
    Ok(s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{haar_state, haar_unitary, induced_state_of_dim, qubit_purity_gap_pair};
    use crate::rng::StreamRng;

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        DensityMatrix::pure(&[Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn inner_product_cases() {
        let mut rng = StreamRng::new(1, 0);
        let psi = haar_state(4, &mut rng);
        assert!((inner_product(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        let zero = DensityMatrix::basis(2, 0);
        let one = DensityMatrix::basis(2, 1);
        assert_eq!(inner_product(&zero, &one).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(8);
        assert!((inner_product(&mixed, &mixed).unwrap() - 0.125).abs() < 1e-15);
        assert!(inner_product(&zero, &mixed).is_err());
    }

    #[test]
    fn purity_cases() {
        assert!((purity(&DensityMatrix::basis(4, 2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(4)).unwrap() - 0.25).abs() < 1e-15);
        let rho = DensityMatrix::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!((purity(&rho).unwrap() - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn inner_product_equals_swap_expectation() {
        let mut rng = StreamRng::new(2, 0);
        for n in 1..=3usize {
            for _ in 0..100 / 3 + 1 {
                let d = 1 << n;
                let rho = induced_state_of_dim(d, 2, &mut rng);
                let sigma = induced_state_of_dim(d, 3, &mut rng);
                let swap = swap_operator(n);
                let direct = inner_product(&rho, &sigma).unwrap();
                let via_swap = swap.trace_product(&kron(rho.matrix(), sigma.matrix())).re;
                assert!((direct - via_swap).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn partial_ip_cases() {
        let mut rng = StreamRng::new(3, 0);
        let rho = induced_state_of_dim(8, 2, &mut rng);
        let sigma = induced_state_of_dim(8, 2, &mut rng);
        assert!((partial_ip(&rho, &sigma, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((partial_ip(&rho, &sigma, 3).unwrap() - inner_product(&rho, &sigma).unwrap()).abs() < 1e-12);
        assert!((partial_ip(&bell(), &bell(), 1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn alg1_conditional_mean_cases() {
        let zero = DensityMatrix::basis(2, 0);
        assert!((alg1_conditional_mean(&zero, &zero, &UnitaryMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = StreamRng::new(4, 0);
        let u = haar_unitary(4, &mut rng);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((alg1_conditional_mean(&mixed, &mixed, &u).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn alg2_conditional_mean_forms_agree() {
        let mut rng = StreamRng::new(5, 0);
        for (n, k) in [(2, 1), (2, 0), (2, 2), (3, 1), (3, 2)] {
            let d = 1usize << n;
            let rho = induced_state_of_dim(d, 2, &mut rng);
            let sigma = induced_state_of_dim(d, 2, &mut rng);
            let u = haar_unitary(1 << (n - k), &mut rng);
            let a = alg2_conditional_mean(&rho, &sigma, k, &u).unwrap();
            let b = alg2_conditional_mean_operator(&rho, &sigma, k, &u).unwrap();
            assert!((a - b).abs() < 1e-10, "n={n} k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn alg2_conditional_mean_limits() {
        let mut rng = StreamRng::new(6, 0);
        let rho = induced_state_of_dim(8, 2, &mut rng);
        let sigma = induced_state_of_dim(8, 2, &mut rng);
        let u1 = haar_unitary(1, &mut rng);
        let full = alg2_conditional_mean(&rho, &sigma, 3, &u1).unwrap();
        assert!((full - inner_product(&rho, &sigma).unwrap()).abs() < 1e-12);
        let u8 = haar_unitary(8, &mut rng);
        let none = alg2_conditional_mean(&rho, &sigma, 0, &u8).unwrap();
        assert!((none - alg1_conditional_mean(&rho, &sigma, &u8).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn distance_and_fidelity_extremes() {
        let mut rng = StreamRng::new(7, 0);
        let psi = haar_state(4, &mut rng);
        assert!(trace_distance(&psi, &psi).unwrap().abs() < 1e-10);
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-8);
        let zero = DensityMatrix::basis(2, 0);
        let one = DensityMatrix::basis(2, 1);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn purity_gap_pair_fidelity_bounds() {
        let eps = 0.01;
        let (rho0, rho1) = qubit_purity_gap_pair(eps).unwrap();
        let f = fidelity(&rho0, &rho1).unwrap();
        assert!(f >= 1.0 - 40.0 * eps * eps);
        let hs = hilbert_schmidt_distance(&rho0, &rho1).unwrap();
        assert!(f <= 1.0 - 0.25 * hs * hs);
        // Closed form for commuting diagonal states.
        let delta = crate::ensembles::purity_gap_shift(eps);
        let closed = ((1.0 / 3.0 * (1.0 / 3.0 + delta)).sqrt() + (2.0 / 3.0 * (2.0 / 3.0 - delta)).sqrt()).powi(2);
        assert!((f - closed).abs() < 1e-12);
    }
}
