//! Budget selection between the two estimators.

use super::config::{Branch, ProtocolConfig};
use crate::error::{Error, Result};

/// Multiplier applied to every big-O budget.
pub const DEFAULT_CALIBRATION: f64 = 8.0;

/// Total copies `⌈c · max(1/ε², 2^{n/2}/ε)⌉` for the collision estimator.
pub fn collision_budget(n: usize, epsilon: f64, calibration: f64) -> usize {
    let inv = 1.0 / epsilon;
    let scale = (inv * inv).max(2f64.powf(n as f64 / 2.0) * inv);
    (calibration * scale).ceil() as usize
}

/// Batches `⌈c · 2^{n-k}/ε²⌉` (one copy each) for the partial swap estimator.
pub fn partial_swap_budget(n: usize, k: usize, epsilon: f64, calibration: f64) -> usize {
    (calibration * 2f64.powi((n - k) as i32) / (epsilon * epsilon)).ceil() as usize
}

/// Copies per batch for the collision estimator given a total budget.
///
/// Within-batch collision noise shrinks like `d / m²` per batch while the
/// basis-to-basis spread is paid once per batch, so `m ≈ d/2` balances the
/// two. At least two batches are kept so a standard error exists.
pub fn collision_batch_size(n: usize, total: usize) -> usize {
    let half_dim = (1usize << n) / 2;
    half_dim.min(total / 2).max(1)
}

/// Picks whichever estimator needs fewer batch-phase copies `N_b · m`,
/// preferring the collision estimator on ties.
pub fn choose_params(n: usize, k: usize, epsilon: f64, calibration: f64) -> Result<ProtocolConfig> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(calibration.is_finite() && calibration > 0.0) {
        return Err(Error::InvalidParameter(format!("calibration constant must be positive, got {calibration}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let collision = collision_budget(n, epsilon, calibration);
    let partial = partial_swap_budget(n, k, epsilon, calibration);
    let mut config = if collision <= partial {
        let m = collision_batch_size(n, collision);
        let mut c = ProtocolConfig::new(n, k, collision.div_ceil(m), m, 0, 0);
        c.branch = Some(Branch::Collision);
        c
    } else {
        let fk_copies = (calibration / (epsilon * epsilon)).ceil() as usize;
        let mut c = ProtocolConfig::new(n, k, partial, 1, fk_copies, 0);
        c.branch = Some(Branch::PartialSwap);
        c
    };
    config.epsilon = epsilon;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_quantum_channel_means_collision_branch() {
        for n in 1..=8 {
            for &eps in &[0.5, 0.1, 0.01] {
                let c = choose_params(n, 0, eps, DEFAULT_CALIBRATION).unwrap();
                assert_eq!(c.branch, Some(Branch::Collision), "n = {n}, eps = {eps}");
            }
        }
    }

    #[test]
    fn full_channel_at_n8_uses_partial_swap() {
        let c = choose_params(8, 8, 0.1, DEFAULT_CALIBRATION).unwrap();
        assert_eq!(c.branch, Some(Branch::PartialSwap));
        assert_eq!(c.n_batches, 800);
        assert_eq!(c.copies_per_batch, 1);
        assert_eq!(c.fk_copies, 800);
    }

    #[test]
    fn tiny_epsilon_is_dominated_by_inverse_square() {
        let n = 6;
        let eps = 2f64.powi(-(n as i32));
        let c = choose_params(n, 3, eps, 1.0).unwrap();
        assert_eq!(c.branch, Some(Branch::Collision));
        assert!(c.batch_copies() >= (1.0 / (eps * eps)) as usize);
    }

    #[test]
    fn collision_split_keeps_two_batches() {
        let c = choose_params(6, 0, 0.1, DEFAULT_CALIBRATION).unwrap();
        assert_eq!(c.copies_per_batch, 32);
        assert!(c.n_batches >= 2);
        assert!(c.batch_copies() >= collision_budget(6, 0.1, DEFAULT_CALIBRATION));
        assert_eq!(collision_batch_size(10, 3), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(choose_params(3, 1, 0.0, 8.0).is_err());
        assert!(choose_params(3, 4, 0.1, 8.0).is_err());
        assert!(choose_params(3, 1, 0.1, -1.0).is_err());
    }
}
