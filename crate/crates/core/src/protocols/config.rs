use crate::error::{Error, Result};

/// Which estimator a configuration drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Shared random basis, collision counting, classical communication only.
    Collision,
    /// Partial swap test on `k` transmitted qubits plus a shared random basis
    /// on the remaining `n - k`.
    PartialSwap,
}

impl Branch {
    pub fn protocol_name(self) -> &'static str {
        match self {
            Branch::Collision => "alg1",
            Branch::PartialSwap => "alg2",
        }
    }
}

/// Parameters of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    /// Qubits per party.
    pub n: usize,
    /// Qubits sent per copy (one-way quantum channel / quantum memory).
    pub k: usize,
    /// Target additive error, used for budgeting and success criteria.
    pub epsilon: f64,
    pub n_batches: usize,
    pub copies_per_batch: usize,
    /// Copies spent estimating the prefix overlap `f_k`.
    pub fk_copies: usize,
    pub master_seed: u64,
    /// Set by `choose_params`; `None` when configured by hand.
    pub branch: Option<Branch>,
}

impl ProtocolConfig {
    pub fn new(
        n: usize,
        k: usize,
        n_batches: usize,
        copies_per_batch: usize,
        fk_copies: usize,
        master_seed: u64,
    ) -> Self {
        Self { n, k, epsilon: 0.1, n_batches, copies_per_batch, fk_copies, master_seed, branch: None }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k > self.n {
            return Err(Error::InvalidParameter(format!("k = {} exceeds n = {}", self.k, self.n)));
        }
        if self.n_batches == 0 || self.copies_per_batch == 0 {
            return Err(Error::InvalidParameter("need at least one batch and one copy per batch".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Copies consumed by the batch phase, `N_b · m`.
    pub fn batch_copies(&self) -> usize {
        self.n_batches * self.copies_per_batch
    }

    pub fn local_dim(&self) -> usize {
        1usize << self.n
    }

    pub fn suffix_dim(&self) -> usize {
        1usize << (self.n - self.k)
    }
}
