//! Born-rule sampling in rotated bases, with post-measurement states.

use num_complex::Complex64;

use super::{DensityMatrix, Matrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Largest tolerated deviation of a probability vector's sum from one.
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;
/// Below this the sampled outcome is treated as impossible.
pub const MIN_SAMPLED_PROBABILITY: f64 = 1e-14;

/// `u_b rho u_b^dagger` for row `u_b` of `U`.
fn row_expectation(u_row: &[Complex64], rho: &Matrix) -> f64 {
    let d = u_row.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        let ui = u_row[i];
        if ui.re == 0.0 && ui.im == 0.0 {
            continue;
        }
        let row = rho.row(i);
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..d {
            inner += row[j] * u_row[j].conj();
        }
        acc += ui * inner;
    }
    acc.re
}

/// Outcome distribution of measuring `rho` in the basis `{U^dagger|b><b|U}`:
/// `p_b = <b|U rho U^dagger|b>`.
pub fn born_probabilities(rho: &DensityMatrix, u: &UnitaryMatrix) -> Result<Vec<f64>> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: u.dim() });
    }
    let um = u.matrix();
    Ok((0..u.dim()).map(|b| row_expectation(um.row(b), rho.matrix())).collect())
}

/// Inverse-CDF sampling with one uniform draw.
///
/// The vector is renormalized when its sum is within `1e-9` of one; larger
/// deviations are reported as numeric corruption. Mass lost to rounding goes
/// to the last outcome with positive probability.
pub fn sample_index(probs: &[f64], rng: &mut StreamRng) -> Result<usize> {
    let sum: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if !sum.is_finite() || (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::Numeric(format!("outcome probabilities sum to {sum}, expected 1")));
    }
    let target = rng.uniform() * sum;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cumulative += p;
        last_positive = Some(i);
        if target < cumulative {
            return Ok(i);
        }
    }
    last_positive.ok_or_else(|| Error::Numeric("no outcome has positive probability".into()))
}

/// Measures `rho` in the basis `{U^dagger|b><b|U}` and returns `b`.
pub fn measure_rotated_basis(rho: &DensityMatrix, u: &UnitaryMatrix, rng: &mut StreamRng) -> Result<usize> {
    let probs = born_probabilities(rho, u)?;
    sample_index(&probs, rng)
}

/// Measurement of the last `n-k` qubits of an `n`-qubit state in a rotated
/// basis, keeping the first `k` qubits.
///
/// Outcome `x` has probability `tr[(I_k ⊗ U^dagger|x><x|U) rho]` and leaves the
/// prefix in `<x|(I ⊗ U) rho (I ⊗ U)^dagger|x> / Pr[x]`. The outcome
/// distribution is computed once so repeated measurements of the same state
/// in the same basis share it.
#[derive(Clone, Debug)]
pub struct SuffixMeasurement<'a> {
    rho: &'a DensityMatrix,
    u: &'a UnitaryMatrix,
    prefix_dim: usize,
    suffix_dim: usize,
    probs: Vec<f64>,
}

impl<'a> SuffixMeasurement<'a> {
    pub fn new(rho: &'a DensityMatrix, u: &'a UnitaryMatrix, k: usize) -> Result<Self> {
        let n = rho
            .num_qubits()
            .ok_or_else(|| Error::InvalidParameter(format!("dimension {} is not a qubit register", rho.dim())))?;
        if k > n {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
        }
        let prefix_dim = 1usize << k;
        let suffix_dim = 1usize << (n - k);
        if u.dim() != suffix_dim {
            return Err(Error::DimensionMismatch { expected: suffix_dim, actual: u.dim() });
        }
        // Pr[x] only depends on the reduced suffix state.
        let m = rho.matrix();
        let mut suffix = Matrix::zeros(suffix_dim);
        for a in 0..prefix_dim {
            let off = a * suffix_dim;
            for s in 0..suffix_dim {
                for t in 0..suffix_dim {
                    suffix[(s, t)] += m[(off + s, off + t)];
                }
            }
        }
        let um = u.matrix();
        let probs = (0..suffix_dim).map(|x| row_expectation(um.row(x), &suffix)).collect();
        Ok(Self { rho, u, prefix_dim, suffix_dim, probs })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Normalized prefix state conditioned on outcome `x`.
    pub fn post_state(&self, x: usize) -> Result<DensityMatrix> {
        if self.suffix_dim == 1 {
            return Ok(self.rho.clone());
        }
        if self.prefix_dim == 1 {
            return Ok(DensityMatrix::basis(1, 0));
        }
        let (pd, sd) = (self.prefix_dim, self.suffix_dim);
        let ux = self.u.matrix().row(x);
        let m = self.rho.matrix();
        let mut block = Matrix::zeros(pd);
        for a in 0..pd {
            for b in a..pd {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..sd {
                    let us = ux[s];
                    let row = &m.row(a * sd + s)[b * sd..(b + 1) * sd];
                    let mut inner = Complex64::new(0.0, 0.0);
                    for t in 0..sd {
                        inner += row[t] * ux[t].conj();
                    }
                    acc += us * inner;
                }
                block[(a, b)] = acc;
                block[(b, a)] = acc.conj();
            }
            block[(a, a)].im = 0.0;
        }
        let weight = block.trace().re;
        if weight < MIN_SAMPLED_PROBABILITY {
            return Err(Error::Numeric(format!("outcome {x} has probability {weight:.3e}; inconsistent sampling")));
        }
        Ok(DensityMatrix::from_trusted(block.scale_real(1.0 / weight)))
    }

    /// Samples `x` and returns it with the prefix post-measurement state.
    pub fn sample(&self, rng: &mut StreamRng) -> Result<(usize, DensityMatrix)> {
        let x = sample_index(&self.probs, rng)?;
        Ok((x, self.post_state(x)?))
    }
}

/// One-shot form of [`SuffixMeasurement::sample`].
pub fn measure_suffix_keep_prefix(
    rho: &DensityMatrix,
    u: &UnitaryMatrix,
    k: usize,
    rng: &mut StreamRng,
) -> Result<(usize, DensityMatrix)> {
    SuffixMeasurement::new(rho, u, k)?.sample(rng)
}
