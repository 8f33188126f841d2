//! Monte Carlo checks of ensemble moments.

use num_complex::Complex64;

use super::likelihood::MC_SIGMAS;
use super::report::{CheckParams, CheckReport};
use crate::cap;
use crate::combinatorics::binomial;
use crate::ensembles::{haar_vector, induced_state, InducedStateParams};
use crate::error::{Error, Result};
use crate::oracles;
use crate::rng::StreamRng;
use crate::stats;
use crate::tensor::ops::kron_vec;
use crate::tensor::perm::sym_dimension;
use crate::tensor::{sym_projector, Matrix};

/// Default Frobenius tolerance for `t` copies.
pub fn haar_moment_threshold(t: usize) -> f64 {
    if t <= 2 {
        0.02
    } else {
        0.03
    }
}

/// Frobenius distance between the sample mean of `ψ^{⊗t}` and
/// `S_t / C(d+t-1, t)`.
pub fn check_haar_moment(
    d: usize,
    t: usize,
    samples: usize,
    threshold: f64,
    rng: &mut StreamRng,
) -> Result<CheckReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let dim = cap::check_power(d, t)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
    for _ in 0..samples {
        let psi = haar_vector(d, rng);
        let mut v = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..t {
            v = kron_vec(&v, &psi);
        }
        for (i, vi) in v.iter().enumerate() {
            let row = &mut acc[i * dim..(i + 1) * dim];
            for (slot, vj) in row.iter_mut().zip(&v) {
                *slot += vi * vj.conj();
            }
        }
    }
    let mean = Matrix::from_vec(dim, acc)?.scale_real(1.0 / samples as f64);
    let exact = sym_projector(t, d)?.scale_real(1.0 / sym_dimension(t, d));
    let residual = (&mean - &exact).frobenius_norm();
    let params = CheckParams::new().with("d", d).with("t", t).with("N", samples);
    Ok(CheckReport::new("haar_moment", params, residual, threshold, samples as u64))
}

/// Collision counts of `T` uniform draws from `[d]`: pairs and triples.
pub fn collision_counts(draws: &[usize], d: usize) -> (f64, f64) {
    let mut counts = vec![0u64; d];
    for &x in draws {
        counts[x] += 1;
    }
    let pairs = counts.iter().map(|&c| binomial(c, 2)).sum();
    let triples = counts.iter().map(|&c| binomial(c, 3)).sum();
    (pairs, triples)
}

/// Empirical `E[X]`, `Var[X]`, `E[Y]` for pair collisions `X` and triple
/// collisions `Y` against `C(T,2)/d`, `(1/d - 1/d²) C(T,2)`, `C(T,3)/d²`.
/// The residual is the largest of the three z-scores.
pub fn check_collision_moments(d: usize, t: usize, trials: usize, rng: &mut StreamRng) -> Result<CheckReport> {
    if d == 0 || trials < 4 {
        return Err(Error::InvalidParameter("need d >= 1 and at least 4 trials".into()));
    }
    let mut xs = Vec::with_capacity(trials);
    let mut ys = Vec::with_capacity(trials);
    let mut draws = vec![0; t];
    for _ in 0..trials {
        for slot in draws.iter_mut() {
            *slot = rng.below(d);
        }
        let (x, y) = collision_counts(&draws, d);
        xs.push(x);
        ys.push(y);
    }
    let df = d as f64;
    let pairs = binomial(t as u64, 2);
    let z_mean = stats::z_score(stats::mean(&xs), pairs / df, stats::standard_error(&xs).unwrap_or(0.0));
    let z_var = stats::z_score(
        stats::sample_variance(&xs).unwrap_or(0.0),
        (1.0 / df - 1.0 / (df * df)) * pairs,
        stats::variance_standard_error(&xs).unwrap_or(0.0),
    );
    let z_triple =
        stats::z_score(stats::mean(&ys), binomial(t as u64, 3) / (df * df), stats::standard_error(&ys).unwrap_or(0.0));
    let residual = z_mean.max(z_var).max(z_triple);
    let params = CheckParams::new().with("d", d).with("T", t).with("N", trials);
    Ok(CheckReport::new("collision_moments", params, residual, MC_SIGMAS, trials as u64))
}

/// `E tr(ρ²) = (2^n ε + 1) / (2^n + ε)` for induced states with `ε = 1/d_E`.
pub fn induced_purity_mean(n: usize, ancilla_dim: usize) -> f64 {
    let d = (1u64 << n) as f64;
    let eps = 1.0 / ancilla_dim as f64;
    (d * eps + 1.0) / (d + eps)
}

/// `Var tr(ρ²) = 2(2^{2n}-1)(1/ε²-1) / ((2^n/ε+1)² (2^n/ε+2) (2^n/ε+3))`.
pub fn induced_purity_variance(n: usize, ancilla_dim: usize) -> f64 {
    let d = (1u64 << n) as f64;
    let eps = 1.0 / ancilla_dim as f64;
    let q = d / eps;
    2.0 * (d * d - 1.0) * (1.0 / (eps * eps) - 1.0) / ((q + 1.0).powi(2) * (q + 2.0) * (q + 3.0))
}

/// Sample mean and variance of the purity of induced states against the
/// closed forms; residual is the larger z-score.
pub fn check_induced_moments(n: usize, ancilla_dim: usize, samples: usize, rng: &mut StreamRng) -> Result<CheckReport> {
    if samples < 4 {
        return Err(Error::InvalidParameter("need at least 4 samples".into()));
    }
    let params = InducedStateParams::new(n, ancilla_dim)?;
    let purities =
        (0..samples).map(|_| oracles::purity(&induced_state(&params, rng)?)).collect::<Result<Vec<f64>>>()?;
    let z_mean = stats::z_score(
        stats::mean(&purities),
        induced_purity_mean(n, ancilla_dim),
        stats::standard_error(&purities).unwrap_or(0.0).max(1e-13),
    );
    let z_var = stats::z_score(
        stats::sample_variance(&purities).unwrap_or(0.0),
        induced_purity_variance(n, ancilla_dim),
        stats::variance_standard_error(&purities).unwrap_or(0.0).max(1e-13),
    );
    let report_params = CheckParams::new().with("n", n).with("de", ancilla_dim).with("N", samples);
    Ok(CheckReport::new("induced_moments", report_params, z_mean.max(z_var), MC_SIGMAS, samples as u64))
}
