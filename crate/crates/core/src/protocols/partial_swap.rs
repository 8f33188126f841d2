//! Inner-product estimation with a `k`-qubit one-way quantum channel.
//!
//! Per copy pair, Alice measures her last `n - k` qubits in a shared Haar
//! basis and sends the outcome together with her `k`-qubit post-measurement
//! prefix. Bob measures his suffix in the same basis and runs a swap test
//! between the received prefix and his own. Because the swap test and the
//! suffix measurements act on disjoint factors, measuring the suffixes first
//! and sampling the swap test from the conditional prefixes has the same
//! joint law as the physical ordering.

use super::collision::check_register;
use super::config::ProtocolConfig;
use super::record::{BatchRecord, Estimate, Run, Transcript};
use super::streams;
use super::swap::{self, outcome};
use crate::ensembles::haar_unitary;
use crate::error::{Error, Result};
use crate::oracles;
use crate::rng::StreamRng;
use crate::tensor::{DensityMatrix, SuffixMeasurement, UnitaryMatrix};

/// The batch's shared Haar unitary on the `2^{n-k}`-dimensional suffix.
pub fn shared_suffix_unitary(n: usize, k: usize, seed: u64, batch: u64) -> UnitaryMatrix {
    haar_unitary(1usize << (n - k), &mut streams::unitary_rng(seed, batch))
}

/// Alice's side of one batch.
#[derive(Debug)]
pub struct AliceBatch<'a> {
    measurement: SuffixMeasurement<'a>,
    rng: StreamRng,
}

impl<'a> AliceBatch<'a> {
    pub fn new(rho: &'a DensityMatrix, u: &'a UnitaryMatrix, k: usize, seed: u64, batch: u64) -> Result<Self> {
        Ok(Self { measurement: SuffixMeasurement::new(rho, u, k)?, rng: streams::alice_rng(seed, batch) })
    }

    /// Measures the next copy: classical outcome and the prefix to transmit.
    pub fn next_copy(&mut self) -> Result<(u32, DensityMatrix)> {
        let (x, post) = self.measurement.sample(&mut self.rng)?;
        Ok((x as u32, post))
    }
}

/// Bob's side of one batch.
#[derive(Debug)]
pub struct BobBatch<'a> {
    measurement: SuffixMeasurement<'a>,
    rng: StreamRng,
    x: Vec<u32>,
    y: Vec<u32>,
    z: Vec<i8>,
}

impl<'a> BobBatch<'a> {
    pub fn new(sigma: &'a DensityMatrix, u: &'a UnitaryMatrix, k: usize, seed: u64, batch: u64) -> Result<Self> {
        Ok(Self {
            measurement: SuffixMeasurement::new(sigma, u, k)?,
            rng: streams::bob_rng(seed, batch),
            x: Vec::new(),
            y: Vec::new(),
            z: Vec::new(),
        })
    }

    /// Processes one copy given Alice's outcome and transmitted prefix.
    pub fn receive(&mut self, x: u32, alice_prefix: &DensityMatrix) -> Result<()> {
        let (y, own_prefix) = self.measurement.sample(&mut self.rng)?;
        if alice_prefix.dim() != own_prefix.dim() {
            return Err(Error::DimensionMismatch { expected: own_prefix.dim(), actual: alice_prefix.dim() });
        }
        let p_plus = 0.5 * (1.0 + oracles::inner_product(alice_prefix, &own_prefix)?);
        self.x.push(x);
        self.y.push(y as u32);
        self.z.push(outcome(p_plus, &mut self.rng));
        Ok(())
    }

    /// `(g̃, x, y, z)` for the batch.
    pub fn finish(self) -> (f64, Vec<u32>, Vec<u32>, Vec<i8>) {
        let g = partial_swap_statistic(&self.x, &self.y, &self.z);
        (g, self.x, self.y, self.z)
    }
}

/// `g̃ = (1/m) Σ_j (1[z_j=+1, x_j=y_j] - 1[z_j=-1, x_j=y_j])`.
pub fn partial_swap_statistic(x: &[u32], y: &[u32], z: &[i8]) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let total: i64 = x.iter().zip(y).zip(z).filter(|((a, b), _)| a == b).map(|(_, &s)| s as i64).sum();
    total as f64 / z.len() as f64
}

/// `w = (2^{n-k} + 1) g̃ - f̃_k`.
pub fn partial_swap_estimator(suffix_dim: usize, g: f64, fk: f64) -> f64 {
    (suffix_dim as f64 + 1.0) * g - fk
}

/// One batch with a fresh shared unitary; returns `(g̃, record)`.
pub fn alg2_batch(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    k: usize,
    copies: usize,
    seed: u64,
    batch: u64,
) -> Result<(f64, BatchRecord)> {
    let n = rho.num_qubits().ok_or_else(|| Error::InvalidParameter("state is not a qubit register".into()))?;
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: sigma.dim() });
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let u = shared_suffix_unitary(n, k, seed, batch);
    let mut alice = AliceBatch::new(rho, &u, k, seed, batch)?;
    let mut bob = BobBatch::new(sigma, &u, k, seed, batch)?;
    for _ in 0..copies {
        let (x, prefix) = alice.next_copy()?;
        bob.receive(x, &prefix)?;
    }
    let (g, x, y, z) = bob.finish();
    Ok((g, BatchRecord { batch: batch as u32, unitary_stream: streams::unitary_stream(batch), x, y, z }))
}

/// The prefix-overlap value used in every batch: the measured estimate, or
/// exactly 1 with no copies when `k = 0`.
pub fn resolve_fk(config: &ProtocolConfig, measured: Estimate) -> Result<Estimate> {
    if config.fk_copies > 0 {
        return Ok(measured);
    }
    if config.k == 0 {
        return Ok(Estimate { value: 1.0, stderr: Some(0.0), samples: 0 });
    }
    Err(Error::InvalidParameter("the prefix-overlap phase needs at least one copy when k > 0".into()))
}

/// Final estimate from the batch values `w_i`; the standard error combines
/// the batch spread with the prefix-overlap estimate's error.
pub fn assemble_alg2_run(
    config: &ProtocolConfig,
    fk: Estimate,
    fk_outcomes: Vec<i8>,
    values: Vec<f64>,
    batches: Vec<BatchRecord>,
) -> Run {
    let batch_estimate = Estimate::from_values(&values, config.batch_copies() as u64);
    let stderr = match (batch_estimate.stderr, fk.stderr) {
        (Some(a), Some(b)) => Some((a * a + b * b).sqrt()),
        _ => None,
    };
    Run {
        estimate: Estimate {
            value: batch_estimate.value,
            stderr,
            samples: (config.batch_copies() + config.fk_copies) as u64,
        },
        transcript: Transcript { batches, fk_outcomes },
        batch_values: values,
        fk: Some(fk),
    }
}

/// Prefix-overlap phase followed by `N_b` batches.
///
/// `E[w] = tr(rho sigma) + (f_k - E[f̃_k])`.
pub fn alg2_run(rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
    config.validate()?;
    check_register(rho, config.n)?;
    check_register(sigma, config.n)?;
    let (measured, fk_outcomes) = swap::alg2_fk_phase(rho, sigma, config.k, config.fk_copies, config.master_seed)?;
    let fk = resolve_fk(config, measured)?;
    let suffix_dim = config.suffix_dim();
    let mut values = Vec::with_capacity(config.n_batches);
    let mut batches = Vec::with_capacity(config.n_batches);
    for batch in 0..config.n_batches as u64 {
        let (g, record) = alg2_batch(rho, sigma, config.k, config.copies_per_batch, config.master_seed, batch)?;
        values.push(partial_swap_estimator(suffix_dim, g, fk.value));
        batches.push(record);
    }
    Ok(assemble_alg2_run(config, fk, fk_outcomes, values, batches))
}

/// Purity `tr(rho^2)` with a `k`-qubit quantum memory: the partial swap
/// protocol run against a second stream of copies of the same state. A
/// memory-bounded single party holding `2N` copies simulates both roles.
pub fn purity_estimate(rho: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
    alg2_run(rho, rho, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_uses_paired_indicators() {
        assert_eq!(partial_swap_statistic(&[1, 2], &[1, 2], &[1, -1]), 0.0);
        assert_eq!(partial_swap_statistic(&[1, 2], &[1, 3], &[1, -1]), 0.5);
        assert_eq!(partial_swap_statistic(&[1, 2], &[2, 1], &[1, 1]), 0.0);
    }

    #[test]
    fn empty_suffix_means_trivial_outcomes() {
        let rho = DensityMatrix::maximally_mixed(4);
        let (_, rec) = alg2_batch(&rho, &rho, 2, 5, 9, 0).unwrap();
        assert!(rec.x.iter().chain(&rec.y).all(|&v| v == 0));
        assert_eq!(rec.z.len(), 5);
    }

    #[test]
    fn k_zero_never_fails_the_swap_test() {
        let rho = DensityMatrix::maximally_mixed(8);
        let sigma = DensityMatrix::basis(8, 1);
        for batch in 0..20 {
            let (_, rec) = alg2_batch(&rho, &sigma, 0, 3, 4, batch).unwrap();
            assert!(rec.z.iter().all(|&z| z == 1));
        }
    }

    #[test]
    fn pure_product_state_estimates_one() {
        let rho = DensityMatrix::basis(8, 0);
        for k in 0..=3 {
            let cfg = ProtocolConfig::new(3, k, 400, 1, 400, 11);
            let run = alg2_run(&rho, &rho, &cfg).unwrap();
            let se = run.estimate.stderr.unwrap();
            assert!((run.estimate.value - 1.0).abs() <= 3.0 * se.max(1e-12), "k = {k}");
        }
    }

    #[test]
    fn missing_prefix_copies_is_an_error() {
        let rho = DensityMatrix::basis(4, 0);
        let cfg = ProtocolConfig::new(2, 1, 4, 1, 0, 1);
        assert!(alg2_run(&rho, &rho, &cfg).is_err());
        let cfg = ProtocolConfig::new(2, 0, 4, 1, 0, 1);
        assert!(alg2_run(&rho, &rho, &cfg).is_ok());
    }
}
