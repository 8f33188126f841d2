//! Protocols selectable by name at runtime.

use super::collision::{alg1_run, check_register};
use super::config::{Branch, ProtocolConfig};
use super::params::{choose_params, DEFAULT_CALIBRATION};
use super::partial_swap::{alg2_run, purity_estimate};
use super::record::{Estimate, Run, Transcript};
use super::swap::alg2_fk_phase;
use crate::error::{Error, Result};
use crate::tensor::DensityMatrix;

/// A two-party estimator of `tr(rho sigma)` or a related quantity.
pub trait Protocol: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Whether the second state takes part; single-state protocols ignore it.
    fn uses_sigma(&self) -> bool {
        true
    }
    fn run(&self, rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run>;
}

struct Collision;

impl Protocol for Collision {
    fn name(&self) -> &'static str {
        "alg1"
    }
    fn description(&self) -> &'static str {
        "shared Haar basis, collision counting, classical messages only"
    }
    fn run(&self, rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
        alg1_run(rho, sigma, config)
    }
}

struct PartialSwap;

impl Protocol for PartialSwap {
    fn name(&self) -> &'static str {
        "alg2"
    }
    fn description(&self) -> &'static str {
        "partial swap test on k transmitted qubits plus a shared Haar basis on the rest"
    }
    fn run(&self, rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
        alg2_run(rho, sigma, config)
    }
}

struct Purity;

impl Protocol for Purity {
    fn name(&self) -> &'static str {
        "purity"
    }
    fn description(&self) -> &'static str {
        "tr(rho^2) with a k-qubit quantum memory via the partial swap estimator"
    }
    fn uses_sigma(&self) -> bool {
        false
    }
    fn run(&self, rho: &DensityMatrix, _sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
        purity_estimate(rho, config)
    }
}

struct FullSwap;

impl Protocol for FullSwap {
    fn name(&self) -> &'static str {
        "swap"
    }
    fn description(&self) -> &'static str {
        "swap test on whole states, N_b * m copies sent in full"
    }
    fn run(&self, rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
        config.validate()?;
        check_register(rho, config.n)?;
        check_register(sigma, config.n)?;
        let (estimate, outcomes) = alg2_fk_phase(rho, sigma, config.n, config.batch_copies(), config.master_seed)?;
        let values: Vec<f64> = outcomes.iter().map(|&z| z as f64).collect();
        Ok(Run {
            estimate: Estimate::from_values(&values, estimate.samples),
            transcript: Transcript { batches: Vec::new(), fk_outcomes: outcomes },
            batch_values: values,
            fk: None,
        })
    }
}

struct Auto;

impl Protocol for Auto {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn description(&self) -> &'static str {
        "budgets from (n, k, epsilon) and the cheaper of alg1 / alg2"
    }
    fn run(&self, rho: &DensityMatrix, sigma: &DensityMatrix, config: &ProtocolConfig) -> Result<Run> {
        let chosen;
        let config = match config.branch {
            Some(_) => config,
            None => {
                chosen = choose_params(config.n, config.k, config.epsilon, DEFAULT_CALIBRATION)?
                    .with_seed(config.master_seed);
                &chosen
            }
        };
        match config.branch {
            Some(Branch::PartialSwap) => alg2_run(rho, sigma, config),
            _ => alg1_run(rho, sigma, config),
        }
    }
}

/// Name-indexed collection of protocols, in registration order.
pub struct ProtocolRegistry {
    entries: Vec<Box<dyn Protocol>>,
}

impl ProtocolRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// `alg1`, `alg2`, `purity`, `swap`, `auto`.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Collision));
        r.register(Box::new(PartialSwap));
        r.register(Box::new(Purity));
        r.register(Box::new(FullSwap));
        r.register(Box::new(Auto));
        r
    }

    /// Adds a protocol, replacing any previous one with the same name.
    pub fn register(&mut self, protocol: Box<dyn Protocol>) {
        self.entries.retain(|p| p.name() != protocol.name());
        self.entries.push(protocol);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Protocol> {
        self.entries.iter().find(|p| p.name() == name).map(|p| p.as_ref()).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown protocol '{name}', expected one of: {}", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|p| p.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Protocol> {
        self.entries.iter().map(|p| p.as_ref())
    }
}

impl Default for ProtocolRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name() {
        let r = ProtocolRegistry::with_defaults();
        assert_eq!(r.names(), ["alg1", "alg2", "purity", "swap", "auto"]);
        assert!(r.get("alg2").is_ok());
        assert!(r.get("nope").is_err());
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let r = ProtocolRegistry::with_defaults();
        let rho = DensityMatrix::maximally_mixed(4);
        let sigma = DensityMatrix::basis(4, 2);
        let cfg = ProtocolConfig::new(2, 1, 20, 2, 20, 5);
        assert_eq!(r.get("alg1").unwrap().run(&rho, &sigma, &cfg).unwrap(), alg1_run(&rho, &sigma, &cfg).unwrap());
        assert_eq!(r.get("alg2").unwrap().run(&rho, &sigma, &cfg).unwrap(), alg2_run(&rho, &sigma, &cfg).unwrap());
        assert_eq!(r.get("purity").unwrap().run(&rho, &sigma, &cfg).unwrap(), alg2_run(&rho, &rho, &cfg).unwrap());
    }

    #[test]
    fn full_swap_on_identical_pure_states() {
        let r = ProtocolRegistry::with_defaults();
        let psi = DensityMatrix::basis(8, 5);
        let run = r.get("swap").unwrap().run(&psi, &psi, &ProtocolConfig::new(3, 0, 10, 3, 0, 1)).unwrap();
        assert_eq!(run.estimate.value, 1.0);
        assert_eq!(run.transcript.fk_outcomes.len(), 30);
    }

    #[test]
    fn auto_follows_choose_params() {
        let r = ProtocolRegistry::with_defaults();
        let rho = DensityMatrix::basis(4, 0);
        let cfg = ProtocolConfig::new(2, 2, 1, 1, 0, 3).with_epsilon(0.5);
        let chosen = choose_params(2, 2, 0.5, DEFAULT_CALIBRATION).unwrap().with_seed(3);
        let expected = match chosen.branch {
            Some(Branch::PartialSwap) => alg2_run(&rho, &rho, &chosen).unwrap(),
            _ => alg1_run(&rho, &rho, &chosen).unwrap(),
        };
        assert_eq!(r.get("auto").unwrap().run(&rho, &rho, &cfg).unwrap(), expected);
    }
}
