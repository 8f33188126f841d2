//! Symmetric-subspace contractions evaluated permutation by permutation,
//! so no `d^t × d^t` projector is ever materialized.

use num_complex::Complex64;

use crate::combinatorics::permutations;
use crate::error::{Error, Result};
use crate::tensor::perm::{PermutationOp, MAX_SYM_COPIES};
use crate::tensor::Matrix;

fn check_copies(t: usize) -> Result<()> {
    if t > MAX_SYM_COPIES {
        return Err(Error::CapExceeded { dim: t, cap: MAX_SYM_COPIES });
    }
    Ok(())
}

fn index_maps(t: usize, d: usize) -> Result<Vec<Vec<usize>>> {
    check_copies(t)?;
    permutations(t).into_iter().map(|p| Ok(PermutationOp::new(p, d)?.index_map())).collect()
}

/// `S_t M S_t` for `M` on `t` copies of `C^d`.
pub fn symmetrize(m: &Matrix, t: usize, d: usize) -> Result<Matrix> {
    let maps = index_maps(t, d)?;
    let dim = m.dim();
    if maps.first().map_or(1, Vec::len) != dim {
        return Err(Error::DimensionMismatch { expected: maps[0].len(), actual: dim });
    }
    let w = 1.0 / maps.len() as f64;
    let mut left = Matrix::zeros(dim);
    for map in &maps {
        for (i, &pi) in map.iter().enumerate() {
            for j in 0..dim {
                left[(pi, j)] += m[(i, j)];
            }
        }
    }
    let mut out = Matrix::zeros(dim);
    for map in &maps {
        for i in 0..dim {
            let row = left.row(i);
            for (j, &pj) in map.iter().enumerate() {
                out[(i, j)] += row[pj];
            }
        }
    }
    Ok(out.scale_real(w * w))
}

/// `tr_A[(X ⊗ I_B) S_{a+b}]` for `X` on the first `a` of `a + b` copies.
pub fn contract_with_sym(x: &Matrix, a: usize, b: usize, d: usize) -> Result<Matrix> {
    let maps = index_maps(a + b, d)?;
    let dim_b = d.pow(b as u32);
    let dim_a = d.pow(a as u32);
    if x.dim() != dim_a {
        return Err(Error::DimensionMismatch { expected: dim_a, actual: x.dim() });
    }
    let mut out = Matrix::zeros(dim_b);
    for map in &maps {
        for (idx, &img) in map.iter().enumerate() {
            let (i, jp) = (idx / dim_b, idx % dim_b);
            let (ipp, j) = (img / dim_b, img % dim_b);
            out[(j, jp)] += x[(i, ipp)];
        }
    }
    Ok(out.scale_real(1.0 / maps.len() as f64))
}

/// `Σ_{π ∈ S_{x+y}} tr((A ⊗ B) π)` for `A` on `x` copies and `B` on `y`.
pub fn permutation_sum_product(a: &Matrix, x: usize, b: &Matrix, y: usize, d: usize) -> Result<Complex64> {
    let maps = index_maps(x + y, d)?;
    let dim_b = d.pow(y as u32);
    if a.dim() != d.pow(x as u32) || b.dim() != dim_b {
        return Err(Error::DimensionMismatch { expected: d.pow(x as u32) * dim_b, actual: a.dim() * b.dim() });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for map in &maps {
        for (i, &img) in map.iter().enumerate() {
            total += a[(i / dim_b, img / dim_b)] * b[(i % dim_b, img % dim_b)];
        }
    }
    Ok(total)
}

/// `Σ_{π ∈ S_t} tr(A π)`.
pub fn permutation_sum(a: &Matrix, t: usize, d: usize) -> Result<Complex64> {
    permutation_sum_product(a, t, &Matrix::identity(1), 0, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ops::kron;
    use crate::tensor::sym_projector;

    fn seeded(dim: usize, seed: u64) -> Matrix {
        let mut rng = crate::StreamRng::new(seed, 0);
        Matrix::from_fn(dim, |_, _| rng.complex_gaussian())
    }

    #[test]
    fn symmetrize_matches_dense_projector() {
        let m = seeded(8, 1);
        let s = sym_projector(3, 2).unwrap();
        let dense = s.matmul(&m).matmul(&s);
        assert!(symmetrize(&m, 3, 2).unwrap().max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn contraction_matches_dense_partial_trace() {
        let x = seeded(3, 2);
        let s = sym_projector(3, 3).unwrap();
        let full = kron(&x, &Matrix::identity(9)).matmul(&s);
        let dense = crate::tensor::partial_trace_dims(&full, &[3, 3, 3], &[1, 2]).unwrap();
        assert!(contract_with_sym(&x, 1, 2, 3).unwrap().max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn permutation_sum_matches_dense() {
        let a = seeded(4, 3);
        let b = seeded(2, 4);
        let s = sym_projector(3, 2).unwrap().scale_real(6.0);
        let dense = kron(&a, &b).trace_product(&s);
        let fast = permutation_sum_product(&a, 2, &b, 1, 2).unwrap();
        assert!((fast - dense).norm() < 1e-12);
        let single = permutation_sum(&a, 2, 2).unwrap();
        let dense_single = a.trace_product(&sym_projector(2, 2).unwrap().scale_real(2.0));
        assert!((single - dense_single).norm() < 1e-12);
    }
}
