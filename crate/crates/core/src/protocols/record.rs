use crate::stats;

/// Point estimate with its batch-mean standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// `None` when fewer than two independent values were averaged.
    pub stderr: Option<f64>,
    pub samples: u64,
}

impl Estimate {
    /// Mean of `values` with `s / sqrt(N)` as the standard error.
    pub fn from_values(values: &[f64], samples: u64) -> Self {
        Self { value: stats::mean(values), stderr: stats::standard_error(values), samples }
    }
}

/// Outcomes of one batch. `z` is empty for protocols without a swap test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchRecord {
    pub batch: u32,
    pub unitary_stream: u64,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub z: Vec<i8>,
}

/// Ordered record of every measurement outcome in a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub batches: Vec<BatchRecord>,
    /// Swap-test outcomes of the prefix-overlap phase, one per copy.
    pub fk_outcomes: Vec<i8>,
}

/// Everything a protocol run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub estimate: Estimate,
    pub transcript: Transcript,
    /// Per-batch estimator values `w_i`.
    pub batch_values: Vec<f64>,
    /// Prefix-overlap estimate, for protocols that have that phase.
    pub fk: Option<Estimate>,
}
