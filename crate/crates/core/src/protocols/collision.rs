//! Distributed inner-product estimation from a shared Haar basis and
//! collision counting: both parties measure their copies in the same random
//! basis, Alice ships her outcomes, and Bob counts coinciding pairs.

use std::collections::HashMap;

use super::config::ProtocolConfig;
use super::record::{BatchRecord, Estimate, Run, Transcript};
use super::streams;
use crate::ensembles::haar_unitary;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::tensor::{born_probabilities, sample_index, DensityMatrix, UnitaryMatrix};

/// `(1/m^2) Σ_{j,k} 1[x_j = y_k]`, normalized by `|x|·|y|`.
pub fn collision_statistic(x: &[u32], y: &[u32]) -> f64 {
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<u32, u64> = HashMap::with_capacity(x.len());
    for &v in x {
        *counts.entry(v).or_default() += 1;
    }
    let hits: u64 = y.iter().map(|v| counts.get(v).copied().unwrap_or(0)).sum();
    hits as f64 / (x.len() as f64 * y.len() as f64)
}

/// `w = (d + 1) g - 1`, unbiased for `tr(rho sigma)` when `g` is the
/// collision statistic in a Haar basis of dimension `d`.
pub fn collision_estimator(dim: usize, g: f64) -> f64 {
    (dim as f64 + 1.0) * g - 1.0
}

/// Measures `copies` copies of `state` in the basis `{U^dagger|b><b|U}`.
pub fn measure_copies(
    state: &DensityMatrix,
    u: &UnitaryMatrix,
    copies: usize,
    rng: &mut StreamRng,
) -> Result<Vec<u32>> {
    let probs = born_probabilities(state, u)?;
    (0..copies).map(|_| sample_index(&probs, rng).map(|b| b as u32)).collect()
}

/// The batch with an explicit unitary; returns `(g, x, y)`.
pub fn alg1_batch_with_unitary(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    u: &UnitaryMatrix,
    copies: usize,
    alice_rng: &mut StreamRng,
    bob_rng: &mut StreamRng,
) -> Result<(f64, Vec<u32>, Vec<u32>)> {
    let x = measure_copies(rho, u, copies, alice_rng)?;
    let y = measure_copies(sigma, u, copies, bob_rng)?;
    Ok((collision_statistic(&x, &y), x, y))
}

/// Alice's half of batch `batch`: regenerate the shared unitary, measure.
pub fn alice_batch(rho: &DensityMatrix, copies: usize, seed: u64, batch: u64) -> Result<Vec<u32>> {
    let u = haar_unitary(rho.dim(), &mut streams::unitary_rng(seed, batch));
    measure_copies(rho, &u, copies, &mut streams::alice_rng(seed, batch))
}

/// Bob's half of batch `batch` given Alice's outcomes; returns `(w_i, y)`.
pub fn bob_batch(sigma: &DensityMatrix, copies: usize, seed: u64, batch: u64, x: &[u32]) -> Result<(f64, Vec<u32>)> {
    let u = haar_unitary(sigma.dim(), &mut streams::unitary_rng(seed, batch));
    let y = measure_copies(sigma, &u, copies, &mut streams::bob_rng(seed, batch))?;
    Ok((collision_estimator(sigma.dim(), collision_statistic(x, &y)), y))
}

/// One batch: returns `w_i = (2^n + 1) g̃_i - 1` and the batch record.
pub fn alg1_batch(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    copies: usize,
    seed: u64,
    batch: u64,
) -> Result<(f64, BatchRecord)> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: sigma.dim() });
    }
    if copies == 0 {
        return Err(Error::InvalidParameter("a batch needs at least one copy".into()));
    }
    let x = alice_batch(rho, copies, seed, batch)?;
    let (w, y) = bob_batch(sigma, copies, seed, batch, &x)?;
    let record =
        BatchRecord { batch: batch as u32, unitary_stream: streams::unitary_stream(batch), x, y, z: Vec::new() };
    Ok((w, record))
}

/// `N_b` batches of `m` copies; the estimate is the mean of `w_i`.
pub fn alg1_run(rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
    config.validate()?;
    check_register(rho, config.n)?;
    check_register(sigma, config.n)?;
    let mut values = Vec::with_capacity(config.n_batches);
    let mut batches = Vec::with_capacity(config.n_batches);
    for batch in 0..config.n_batches as u64 {
        let (w, record) = alg1_batch(rho, sigma, config.copies_per_batch, config.master_seed, batch)?;
        values.push(w);
        batches.push(record);
    }
    Ok(assemble_alg1_run(config, values, batches))
}

/// Final estimate from the batch values `w_i`.
pub fn assemble_alg1_run(config: &ProtocolConfig, values: Vec<f64>, batches: Vec<BatchRecord>) -> Run {
    Run {
        estimate: Estimate::from_values(&values, config.batch_copies() as u64),
        transcript: Transcript { batches, fk_outcomes: Vec::new() },
        batch_values: values,
        fk: None,
    }
}

pub(crate) fn check_register(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.num_qubits() != Some(n) {
        return Err(Error::DimensionMismatch { expected: 1usize << n, actual: rho.dim() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collision_statistic_counts_all_pairs() {
        assert_eq!(collision_statistic(&[1, 1], &[1, 2]), 0.5);
        assert_eq!(collision_statistic(&[0, 1, 2], &[3, 4, 5]), 0.0);
        assert_eq!(collision_statistic(&[7; 4], &[7; 4]), 1.0);
    }

    #[test]
    fn identity_basis_on_identical_basis_states() {
        let rho = DensityMatrix::basis(8, 0);
        let u = UnitaryMatrix::identity(8);
        let mut a = StreamRng::new(1, 1);
        let mut b = StreamRng::new(1, 2);
        let (g, x, y) = alg1_batch_with_unitary(&rho, &rho, &u, 4, &mut a, &mut b).unwrap();
        assert_eq!(g, 1.0);
        assert_eq!(x, vec![0; 4]);
        assert_eq!(y, vec![0; 4]);
        assert_eq!(collision_estimator(8, g), 8.0);
    }

    #[test]
    fn run_rejects_mismatched_register() {
        let rho = DensityMatrix::maximally_mixed(4);
        let cfg = ProtocolConfig::new(3, 0, 2, 1, 0, 1);
        assert!(alg1_run(&rho, &rho, &cfg).is_err());
    }

    #[test]
    fn single_batch_has_no_stderr() {
        let rho = DensityMatrix::maximally_mixed(4);
        let cfg = ProtocolConfig::new(2, 0, 1, 3, 0, 1);
        let run = alg1_run(&rho, &rho, &cfg).unwrap();
        assert_eq!(run.estimate.stderr, None);
        assert_eq!(run.estimate.samples, 3);
    }
}
