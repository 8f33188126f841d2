//! `Σ_s tr(F_s SWAP)² / tr(F_s)` for concrete rank-one POVMs on two copies
//! of an `n`-qubit register.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::channels::EXACT_TOL;
use super::report::{CheckParams, CheckReport};
use crate::cap;
use crate::ensembles::haar_unitary;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PovmInstance {
    /// Product computational basis on both copies.
    Computational,
    /// Bell basis on each pair (qubit `i` of copy A, qubit `i` of copy B).
    Bell,
    /// Columns of a Haar unitary on the joint space.
    Haar,
}

impl fmt::Display for PovmInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PovmInstance::Computational => "computational",
            PovmInstance::Bell => "bell",
            PovmInstance::Haar => "haar",
        })
    }
}

impl FromStr for PovmInstance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "computational" => Ok(PovmInstance::Computational),
            "bell" => Ok(PovmInstance::Bell),
            "haar" => Ok(PovmInstance::Haar),
            _ => Err(Error::InvalidParameter(format!("POVM instance must be computational, bell or haar, got '{s}'"))),
        }
    }
}

/// `<v|SWAP|v>` where SWAP exchanges the high and low `n` qubits.
fn swap_expectation(v: &[Complex64], n: usize) -> f64 {
    let half = 1usize << n;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, vi) in v.iter().enumerate() {
        let (a, b) = (i / half, i % half);
        acc += vi.conj() * v[b * half + a];
    }
    acc.re
}

/// Amplitude `<a b|Bell_s>` on one pair: Φ±, Ψ± for `s = 0..4`.
fn bell_amplitude(s: usize, a: usize, b: usize) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match (s, a, b) {
        (0 | 1, 0, 0) => h,
        (0, 1, 1) => h,
        (1, 1, 1) => -h,
        (2 | 3, 0, 1) => h,
        (2, 1, 0) => h,
        (3, 1, 0) => -h,
        _ => 0.0,
    }
}

fn bell_vector(label: usize, n: usize) -> Vec<Complex64> {
    let half = 1usize << n;
    (0..half * half)
        .map(|i| {
            let (a, b) = (i / half, i % half);
            let amp: f64 = (0..n)
                .map(|q| {
                    let shift = n - 1 - q;
                    bell_amplitude((label >> (2 * shift)) & 3, (a >> shift) & 1, (b >> shift) & 1)
                })
                .product();
            Complex64::new(amp, 0.0)
        })
        .collect()
}

/// The sum over all `4^n` rank-one outcomes of the chosen instance.
pub fn povm_swap_sum(instance: PovmInstance, n: usize, rng: &mut StreamRng) -> Result<f64> {
    let dim = cap::check_power(2, 2 * n)?;
    let half = 1usize << n;
    Ok(match instance {
        PovmInstance::Computational => (0..dim).filter(|i| i / half == i % half).count() as f64,
        PovmInstance::Bell => (0..dim).map(|s| swap_expectation(&bell_vector(s, n), n).powi(2)).sum(),
        PovmInstance::Haar => {
            let u = haar_unitary(dim, rng);
            let m = u.matrix();
            (0..dim)
                .map(|s| {
                    let col: Vec<Complex64> = (0..dim).map(|i| m[(i, s)]).collect();
                    swap_expectation(&col, n).powi(2)
                })
                .sum()
        }
    })
}

/// Residual `sum - 2^{k+n}`; passes when the sum stays under the bound.
pub fn check_povm_swap_bound(instance: PovmInstance, n: usize, k: usize, rng: &mut StreamRng) -> Result<CheckReport> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let sum = povm_swap_sum(instance, n, rng)?;
    let bound = 2f64.powi((k + n) as i32);
    let params = CheckParams::new().with("instance", instance).with("n", n).with("k", k);
    Ok(CheckReport::new("povm_swap_bound", params, sum - bound, EXACT_TOL, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_states_are_swap_eigenvectors() {
        for s in 0..4 {
            let v = bell_vector(s, 1);
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            let expected = if s == 3 { -1.0 } else { 1.0 };
            assert!((swap_expectation(&v, 1) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn instance_sums() {
        let mut rng = StreamRng::new(3, 0);
        assert_eq!(povm_swap_sum(PovmInstance::Computational, 3, &mut rng).unwrap(), 8.0);
        assert!((povm_swap_sum(PovmInstance::Bell, 2, &mut rng).unwrap() - 16.0).abs() < 1e-12);
        assert!(check_povm_swap_bound(PovmInstance::Bell, 2, 2, &mut rng).unwrap().passed);
        assert!(!check_povm_swap_bound(PovmInstance::Bell, 2, 0, &mut rng).unwrap().passed);
        assert!(check_povm_swap_bound(PovmInstance::Haar, 2, 0, &mut rng).unwrap().passed);
    }
}
