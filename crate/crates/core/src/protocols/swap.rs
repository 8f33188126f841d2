//! The two-outcome swap test and the prefix-overlap phase built on it.

use super::record::Estimate;
use super::streams;
use crate::error::Result;
use crate::oracles;
use crate::rng::StreamRng;
use crate::stats;
use crate::tensor::{ops, DensityMatrix};

/// `Pr[z = +1] = (1 + tr(rho sigma)) / 2` for the POVM `{(I ± SWAP)/2}`.
pub fn swap_test_probability(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * (1.0 + oracles::inner_product(rho, sigma)?))
}

/// One swap-test outcome, `+1` or `-1`.
pub fn swap_test_sample(rho: &DensityMatrix, sigma: &DensityMatrix, rng: &mut StreamRng) -> Result<i8> {
    let p = swap_test_probability(rho, sigma)?;
    Ok(outcome(p, rng))
}

pub(crate) fn outcome(p_plus: f64, rng: &mut StreamRng) -> i8 {
    if rng.bernoulli(p_plus) {
        1
    } else {
        -1
    }
}

/// Reduction of a state to its first `k` qubits, which is what Alice sends
/// during the prefix-overlap phase.
pub fn prefix_state(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    if k == 0 {
        return Ok(DensityMatrix::basis(1, 0));
    }
    let mut m = ops::trace_out_suffix(rho.matrix(), k)?;
    m.hermitize();
    Ok(DensityMatrix::from_trusted(m))
}

/// Bob's side of the prefix-overlap phase: swap tests of each received
/// prefix against his own. Draws come from the run's `f_k` stream.
#[derive(Debug)]
pub struct PrefixOverlapReceiver {
    own_prefix: DensityMatrix,
    rng: StreamRng,
    outcomes: Vec<i8>,
}

impl PrefixOverlapReceiver {
    pub fn new(sigma: &DensityMatrix, k: usize, seed: u64) -> Result<Self> {
        Ok(Self { own_prefix: prefix_state(sigma, k)?, rng: streams::fk_rng(seed), outcomes: Vec::new() })
    }

    pub fn own_prefix(&self) -> &DensityMatrix {
        &self.own_prefix
    }

    pub fn receive(&mut self, alice_prefix: &DensityMatrix) -> Result<i8> {
        let z = swap_test_sample(alice_prefix, &self.own_prefix, &mut self.rng)?;
        self.outcomes.push(z);
        Ok(z)
    }

    /// `f̃_k = mean(z) = 2·Pr̂[+1] - 1` with its standard error.
    pub fn finish(self) -> (Estimate, Vec<i8>) {
        let values: Vec<f64> = self.outcomes.iter().map(|&z| z as f64).collect();
        let estimate = Estimate {
            value: stats::mean(&values),
            stderr: stats::standard_error(&values),
            samples: values.len() as u64,
        };
        (estimate, self.outcomes)
    }
}

/// Estimates `f_k = tr(tr_{>k}(rho) tr_{>k}(sigma))` from `copies` swap tests
/// on the `k`-qubit prefixes.
pub fn alg2_fk_phase(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    k: usize,
    copies: usize,
    seed: u64,
) -> Result<(Estimate, Vec<i8>)> {
    let alice_prefix = prefix_state(rho, k)?;
    let mut bob = PrefixOverlapReceiver::new(sigma, k, seed)?;
    for _ in 0..copies {
        bob.receive(&alice_prefix)?;
    }
    Ok(bob.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pure_states_always_pass() {
        let psi = DensityMatrix::basis(4, 3);
        assert_eq!(swap_test_probability(&psi, &psi).unwrap(), 1.0);
        let mut rng = StreamRng::new(1, 0);
        assert!((0..1000).all(|_| swap_test_sample(&psi, &psi, &mut rng).unwrap() == 1));
    }

    #[test]
    fn orthogonal_states_are_a_fair_coin() {
        let a = DensityMatrix::basis(2, 0);
        let b = DensityMatrix::basis(2, 1);
        assert_eq!(swap_test_probability(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn maximally_mixed_qubits_pass_three_quarters() {
        let m = DensityMatrix::maximally_mixed(2);
        assert_eq!(swap_test_probability(&m, &m).unwrap(), 0.75);
        let mut rng = StreamRng::new(2, 0);
        let n = 100_000;
        let plus = (0..n).filter(|_| swap_test_sample(&m, &m, &mut rng).unwrap() == 1).count();
        let sigma = (0.75 * 0.25 / n as f64).sqrt();
        assert!((plus as f64 / n as f64 - 0.75).abs() < 3.0 * sigma);
    }

    #[test]
    fn empty_prefix_overlap_is_one() {
        let rho = DensityMatrix::maximally_mixed(8);
        let sigma = DensityMatrix::basis(8, 5);
        let (est, z) = alg2_fk_phase(&rho, &sigma, 0, 50, 3).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.stderr, Some(0.0));
        assert!(z.iter().all(|&v| v == 1));
    }
}
