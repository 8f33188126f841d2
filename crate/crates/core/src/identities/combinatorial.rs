//! Permutation-sum identities and inequalities.

use super::channels::EXACT_TOL;
use super::report::{CheckParams, CheckReport};
use super::sym::{permutation_sum, permutation_sum_product};
use crate::combinatorics::{cycle_count, permutations, rising_factorial};
use crate::error::{Error, Result};
use crate::oracles::IMAGINARY_TOL;
use crate::tensor::Matrix;

/// Largest `t` enumerated by the cycle-count identity.
pub const MAX_STIRLING_T: usize = 7;

fn real(z: num_complex::Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOL * z.norm().max(1.0) {
        return Err(Error::Numeric(format!("permutation sum has imaginary part {}", z.im)));
    }
    Ok(z.re)
}

/// Residual `RHS - LHS` of
/// `tr((rho_x ⊗ rho_y) Σ_{S_{x+y}} π) ≥ tr(rho_x Σ_{S_x} π) tr(rho_y Σ_{S_y} π)`.
pub fn check_perm_inequality(rho_x: &Matrix, x: usize, rho_y: &Matrix, y: usize, d: usize) -> Result<CheckReport> {
    let lhs = real(permutation_sum_product(rho_x, x, rho_y, y, d)?)?;
    let rhs = real(permutation_sum(rho_x, x, d)?)? * real(permutation_sum(rho_y, y, d)?)?;
    let params = CheckParams::new().with("d", d).with("x", x).with("y", y);
    Ok(CheckReport::new("perm_inequality", params, rhs - lhs, EXACT_TOL, 0))
}

/// `Σ_{π ∈ S_t} x^{c(π)}` by enumeration.
pub fn cycle_weighted_sum(t: usize, x: f64) -> f64 {
    permutations(t).iter().map(|p| x.powi(cycle_count(p) as i32)).sum()
}

/// Relative gap between `Σ_π x^{c(π)}` and `x (x+1) ⋯ (x+t-1)`.
pub fn check_stirling_identity(t: usize, x: f64) -> Result<CheckReport> {
    if t > MAX_STIRLING_T {
        return Err(Error::CapExceeded { dim: t, cap: MAX_STIRLING_T });
    }
    let lhs = cycle_weighted_sum(t, x);
    let rhs = rising_factorial(x, t);
    let residual = (lhs - rhs).abs() / rhs.abs().max(1.0);
    let params = CheckParams::new().with("t", t).with("x", x);
    Ok(CheckReport::new("stirling", params, residual, EXACT_TOL, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_by_hand() {
        assert_eq!(cycle_weighted_sum(3, 2.0), 24.0);
        assert_eq!(cycle_weighted_sum(4, 3.0), 360.0);
        assert_eq!(cycle_weighted_sum(1, 5.0), 5.0);
        assert!(check_stirling_identity(7, 0.5).unwrap().passed);
        assert!(check_stirling_identity(8, 1.0).is_err());
    }

    #[test]
    fn perm_inequality_on_basis_qubits() {
        let p = Matrix::basis_projector(2, 0);
        let r = check_perm_inequality(&p, 1, &p, 1, 2).unwrap();
        assert_eq!(r.residual, -1.0);
        assert!(r.passed);
    }
}
