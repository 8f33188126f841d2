//! Tensor products, partial traces and subsystem reorderings.
//!
//! Ordering convention: in a register of subsystems `s_0 ⊗ s_1 ⊗ ...`, the
//! digit of `s_0` is the most significant in the basis index. For qubit
//! registers this means qubit 0 is the leading bit, so `|q_0 q_1 ... q_{n-1}>`
//! has index `q_0 2^{n-1} + ... + q_{n-1}`.

use num_complex::Complex64;

use super::Matrix;
use crate::error::{Error, Result};

/// Kronecker product: `(A ⊗ B)[i*dB + k, j*dB + l] = A[i][j] B[k][l]`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut out = Matrix::zeros(d);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a Matrix>) -> Matrix {
    factors.into_iter().fold(Matrix::identity(1), |acc, f| kron(&acc, f))
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_keep(keep: &[usize], count: usize) -> Result<()> {
    let ok = keep.iter().all(|&q| q < count) && keep.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidIndexSet { indices: keep.to_vec(), n: count })
    }
}

/// Splits a full index into its digits for the given local dimensions.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn compose(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (digit, dim)| acc * dim + digit)
}

/// Partial trace over every subsystem not listed in `keep` (ascending,
/// duplicate-free). Kept subsystems stay in their original order.
pub fn partial_trace_dims(m: &Matrix, dims: &[usize], keep: &[usize]) -> Result<Matrix> {
    check_keep(keep, dims.len())?;
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch { expected: total, actual: m.dim() });
    }
    let kept_dim: usize = keep.iter().map(|&q| dims[q]).product();
    let traced: Vec<usize> = (0..dims.len()).filter(|q| !keep.contains(q)).collect();
    let traced_dim: usize = traced.iter().map(|&q| dims[q]).product();

    // groups[t] lists (kept index, full index) for traced index t.
    let mut groups = vec![Vec::with_capacity(kept_dim); traced_dim];
    let mut buf = vec![0; dims.len()];
    for i in 0..total {
        digits(i, dims, &mut buf);
        let k = compose(keep.iter().map(|&q| (buf[q], dims[q])));
        let t = compose(traced.iter().map(|&q| (buf[q], dims[q])));
        groups[t].push((k, i));
    }

    let mut out = Matrix::zeros(kept_dim);
    for group in &groups {
        for &(ka, a) in group {
            for &(kb, b) in group {
                out[(ka, kb)] += m[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Partial trace on an `n`-qubit register, keeping the listed qubits.
pub fn partial_trace(m: &Matrix, keep: &[usize]) -> Result<Matrix> {
    let n = super::state::qubits_for_dim(m.dim())
        .ok_or(Error::InvalidParameter(format!("dimension {} is not a qubit register", m.dim())))?;
    partial_trace_dims(m, &vec![2; n], keep)
}

/// Reduced operator on the first `k` qubits (`tr_{>k}`).
pub fn trace_out_suffix(m: &Matrix, k: usize) -> Result<Matrix> {
    let keep: Vec<usize> = (0..k).collect();
    partial_trace(m, &keep)
}

/// SWAP between two `m`-qubit registers, a `2^{2m}`-dimensional permutation
/// matrix. `m = 0` gives the 1×1 identity.
pub fn swap_operator(m: usize) -> Matrix {
    let half = 1usize << m;
    let mut out = Matrix::zeros(half * half);
    for a in 0..half {
        for b in 0..half {
            out[(b * half + a, a * half + b)] = Complex64::new(1.0, 0.0);
        }
    }
    out
}

/// Reorders tensor factors: output factor `i` is input factor `order[i]`.
/// Returns `P M P^dagger` for the corresponding permutation unitary `P`.
pub fn permute_subsystems(m: &Matrix, dims: &[usize], order: &[usize]) -> Result<Matrix> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidIndexSet { indices: order.to_vec(), n: dims.len() });
    }
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch { expected: total, actual: m.dim() });
    }
    let mut buf = vec![0; dims.len()];
    let map: Vec<usize> = (0..total)
        .map(|i| {
            digits(i, dims, &mut buf);
            compose(order.iter().map(|&q| (buf[q], dims[q])))
        })
        .collect();
    let mut out = Matrix::zeros(total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}
