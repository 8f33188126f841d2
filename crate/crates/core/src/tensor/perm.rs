//! Permutation operators on `t` copies of a `d`-dimensional space and the
//! symmetric-subspace projector built from them.

use num_complex::Complex64;

use super::Matrix;
use crate::cap;
use crate::combinatorics::{self, cycle_count, is_permutation};
use crate::error::{Error, Result};

/// Largest copy count for which `sym_projector` sums all `t!` permutations.
pub const MAX_SYM_COPIES: usize = 6;

/// The operator `π^d` acting on `(C^d)^{⊗t}` by
/// `π|i_1 … i_t> = |i_{π^{-1}(1)} … i_{π^{-1}(t)}>`: the factor in slot `s`
/// moves to slot `π(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationOp {
    perm: Vec<usize>,
    local_dim: usize,
    dim: usize,
}

impl PermutationOp {
    /// `perm[s]` is `π(s)` (0-based).
    pub fn new(perm: Vec<usize>, local_dim: usize) -> Result<Self> {
        if !is_permutation(&perm) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
        if local_dim == 0 {
            return Err(Error::InvalidParameter("local dimension must be positive".into()));
        }
        let dim = cap::check_power(local_dim, perm.len())?;
        Ok(Self { perm, local_dim, dim })
    }

    pub fn identity(t: usize, local_dim: usize) -> Result<Self> {
        Self::new((0..t).collect(), local_dim)
    }

    pub fn copies(&self) -> usize {
        self.perm.len()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cycles(&self) -> usize {
        cycle_count(&self.perm)
    }

    /// Index of `π|i>`.
    pub fn image(&self, index: usize) -> usize {
        let t = self.perm.len();
        let d = self.local_dim;
        let mut digits = vec![0; t];
        let mut rest = index;
        for slot in (0..t).rev() {
            digits[slot] = rest % d;
            rest /= d;
        }
        let mut moved = vec![0; t];
        for (slot, &digit) in digits.iter().enumerate() {
            moved[self.perm[slot]] = digit;
        }
        moved.iter().fold(0, |acc, &x| acc * d + x)
    }

    /// `image` for every basis index.
    pub fn index_map(&self) -> Vec<usize> {
        (0..self.dim).map(|i| self.image(i)).collect()
    }

    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for (i, j) in self.index_map().into_iter().enumerate() {
            m[(j, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `tr(π) = d^{c(π)}`.
    pub fn trace(&self) -> f64 {
        (self.local_dim as f64).powi(self.cycles() as i32)
    }

    /// `tr(M π)` in `O(d^t)` without materializing `π`.
    pub fn trace_with(&self, m: &Matrix) -> Result<Complex64> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: m.dim() });
        }
        Ok((0..self.dim).map(|i| m[(i, self.image(i))]).sum())
    }
}

/// Dense `π^d` for a permutation given as images (`perm[s] = π(s)`).
pub fn permutation_operator(perm: &[usize], local_dim: usize) -> Result<Matrix> {
    Ok(PermutationOp::new(perm.to_vec(), local_dim)?.matrix())
}

/// Projector onto the symmetric subspace of `t` copies: `(1/t!) Σ_π π^d`.
pub fn sym_projector(t: usize, local_dim: usize) -> Result<Matrix> {
    if t > MAX_SYM_COPIES {
        return Err(Error::CapExceeded { dim: t, cap: MAX_SYM_COPIES });
    }
    let dim = cap::check_power(local_dim, t)?;
    let perms = combinatorics::permutations(t);
    let weight = Complex64::new(1.0 / perms.len() as f64, 0.0);
    let mut s = Matrix::zeros(dim);
    for perm in perms {
        let op = PermutationOp::new(perm, local_dim)?;
        for i in 0..dim {
            s[(op.image(i), i)] += weight;
        }
    }
    Ok(s)
}

/// Dimension of the symmetric subspace, `C(d+t-1, t)`.
pub fn sym_dimension(t: usize, local_dim: usize) -> f64 {
    combinatorics::binomial((local_dim + t - 1) as u64, t as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ops::swap_operator;

    #[test]
    fn identity_permutation_is_identity() {
        for (t, d) in [(1, 2), (2, 3), (3, 2)] {
            let op = PermutationOp::identity(t, d).unwrap();
            assert_eq!(op.matrix(), Matrix::identity(op.dim()));
        }
    }

    #[test]
    fn transposition_is_swap_with_trace_d() {
        let op = PermutationOp::new(vec![1, 0], 2).unwrap();
        assert_eq!(op.matrix(), swap_operator(1));
        assert_eq!(op.trace(), 2.0);
        let op3 = PermutationOp::new(vec![1, 0], 3).unwrap();
        assert_eq!(op3.matrix().trace().re, 3.0);
    }

    #[test]
    fn three_cycle_trace_counts_fixed_points() {
        // Enumerate fixed basis vectors of the 3-cycle on (C^2)^{⊗3}.
        let op = PermutationOp::new(vec![1, 2, 0], 2).unwrap();
        let fixed = (0..8).filter(|&i| op.image(i) == i).count();
        assert_eq!(fixed, 2);
        assert_eq!(op.matrix().trace().re, 2.0);
    }

    #[test]
    fn action_moves_slot_s_to_pi_s() {
        // π = (0 -> 1, 1 -> 2, 2 -> 0) on |a b c> gives |c a b>.
        let op = PermutationOp::new(vec![1, 2, 0], 3).unwrap();
        let idx = |a: usize, b: usize, c: usize| a * 9 + b * 3 + c;
        assert_eq!(op.image(idx(0, 1, 2)), idx(2, 0, 1));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(PermutationOp::identity(13, 2), Err(Error::CapExceeded { .. })));
        assert!(matches!(sym_projector(7, 1), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn symmetric_projector_dimensions() {
        assert_eq!(sym_projector(1, 3).unwrap(), Matrix::identity(3));
        assert!((sym_projector(2, 2).unwrap().trace().re - 3.0).abs() < 1e-12);
        assert!((sym_projector(3, 2).unwrap().trace().re - 4.0).abs() < 1e-12);
        assert_eq!(sym_dimension(3, 2), 4.0);
    }

    #[test]
    fn trace_with_matches_dense_product() {
        let op = PermutationOp::new(vec![2, 0, 1], 2).unwrap();
        let m = Matrix::from_fn(8, |i, j| Complex64::new((i * 8 + j) as f64, (i as f64) - (j as f64)));
        let dense = m.matmul(&op.matrix()).trace();
        assert!((op.trace_with(&m).unwrap() - dense).norm() < 1e-9);
    }
}
