//! Likelihood ratio of a measurement leaf under induced states versus the
//! maximally mixed state, for computational-basis outcomes.

use super::channels::EXACT_TOL;
use super::report::{CheckParams, CheckReport};
use crate::cap;
use crate::ensembles::induced_state_of_dim;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stats;
use crate::tensor::ops::partial_trace_dims;
use crate::tensor::perm::sym_dimension;
use crate::tensor::sym_projector;

/// Sigma-unit threshold for Monte Carlo checks.
pub const MC_SIGMAS: f64 = 3.0;

/// Standard leaf shapes of length `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafShape {
    /// `x_1 = … = x_T = 0`.
    Equal,
    /// `x_t = t`; needs `T ≤ d`.
    Distinct,
}

impl LeafShape {
    pub fn outcomes(self, t: usize, d: usize) -> Result<Vec<usize>> {
        match self {
            LeafShape::Equal => Ok(vec![0; t]),
            LeafShape::Distinct if t <= d => Ok((0..t).collect()),
            LeafShape::Distinct => {
                Err(Error::InvalidParameter(format!("{t} distinct outcomes need d >= {t}, got {d}")))
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LeafShape::Equal => "equal",
            LeafShape::Distinct => "distinct",
        }
    }
}

impl std::str::FromStr for LeafShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(LeafShape::Equal),
            "distinct" => Ok(LeafShape::Distinct),
            _ => Err(Error::InvalidParameter(format!("leaf must be 'equal' or 'distinct', got '{s}'"))),
        }
    }
}

fn outcome_counts(leaf: &[usize], d: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0; d];
    for &x in leaf {
        *counts
            .get_mut(x)
            .ok_or_else(|| Error::InvalidParameter(format!("outcome {x} out of range for d = {d}")))? += 1;
    }
    Ok(counts)
}

/// `L(ℓ) = Π_y Π_{j<b_y} (1 + jε) / Π_{i=1}^{T-1} (1 + iε/d)` where `b_y` is
/// the multiplicity of outcome `y` in the leaf.
pub fn likelihood_ratio_closed_form(d: usize, epsilon: f64, leaf: &[usize]) -> Result<f64> {
    let counts = outcome_counts(leaf, d)?;
    let num: f64 = counts.iter().map(|&b| (0..b).map(|j| 1.0 + j as f64 * epsilon).product::<f64>()).product();
    let den: f64 = (1..leaf.len()).map(|i| 1.0 + i as f64 * epsilon / d as f64).product();
    Ok(num / den)
}

/// One Monte Carlo draw of `d^T Π_t <x_t|ρ|x_t>` with `ρ` induced.
fn leaf_weight_sample(d: usize, ancilla_dim: usize, leaf: &[usize], rng: &mut StreamRng) -> f64 {
    let rho = induced_state_of_dim(d, ancilla_dim, rng);
    leaf.iter().map(|&x| d as f64 * rho.matrix()[(x, x)].re).product()
}

/// Monte Carlo `q(ℓ)/p(ℓ)` against the closed form with `ε = 1/d_E`;
/// residual in standard errors.
pub fn check_likelihood_ratio(
    d: usize,
    ancilla_dim: usize,
    leaf: &[usize],
    samples: usize,
    rng: &mut StreamRng,
) -> Result<CheckReport> {
    if ancilla_dim == 0 || d == 0 {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    cap::check_dim(d * ancilla_dim)?;
    let exact = likelihood_ratio_closed_form(d, 1.0 / ancilla_dim as f64, leaf)?;
    let values: Vec<f64> = (0..samples).map(|_| leaf_weight_sample(d, ancilla_dim, leaf, rng)).collect();
    let se = stats::standard_error(&values).unwrap_or(f64::NAN);
    let residual = stats::z_score(stats::mean(&values), exact, se);
    let params = CheckParams::new()
        .with("d", d)
        .with("de", ancilla_dim)
        .with("T", leaf.len())
        .with("leaf", format!("{leaf:?}").replace(' ', ""))
        .with("N", samples);
    Ok(CheckReport::new("likelihood_ratio", params, residual, MC_SIGMAS, samples as u64))
}

/// Exact `E ρ^{⊗T}` for induced states: the normalized symmetric projector
/// on `(C^d ⊗ C^{d_E})^{⊗T}` with every ancilla traced out.
pub fn induced_tensor_moment(d: usize, ancilla_dim: usize, t: usize) -> Result<crate::tensor::Matrix> {
    let big = d * ancilla_dim;
    let s = sym_projector(t, big)?;
    let dims: Vec<usize> = (0..t).flat_map(|_| [d, ancilla_dim]).collect();
    let keep: Vec<usize> = (0..t).map(|i| 2 * i).collect();
    Ok(partial_trace_dims(&s, &dims, &keep)?.scale_real(1.0 / sym_dimension(t, big)))
}

/// Compares `d^T q(ℓ)` from the exact moment with `L(ℓ)` on every one of the
/// `d^T` leaves, and checks `Σ_ℓ p(ℓ) L(ℓ) = 1` under uniform `p`.
pub fn check_likelihood_normalization(d: usize, ancilla_dim: usize, t: usize) -> Result<CheckReport> {
    let moment = induced_tensor_moment(d, ancilla_dim, t)?;
    let epsilon = 1.0 / ancilla_dim as f64;
    let leaves = moment.dim();
    let scale = (d as f64).powi(t as i32);
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for idx in 0..leaves {
        let mut leaf = vec![0; t];
        let mut rest = idx;
        for slot in (0..t).rev() {
            leaf[slot] = rest % d;
            rest /= d;
        }
        let closed = likelihood_ratio_closed_form(d, epsilon, &leaf)?;
        worst = worst.max((scale * moment[(idx, idx)].re - closed).abs());
        total += closed / scale;
    }
    let residual = worst.max((total - 1.0).abs());
    let params = CheckParams::new().with("d", d).with("de", ancilla_dim).with("T", t);
    Ok(CheckReport::new("likelihood_normalization", params, residual, EXACT_TOL, 0))
}
