//! Seeded samplers for the random-state families: Haar unitaries and
//! states, random induced states, convex mixtures of Haar states, Haar
//! conjugations of a fixed state, and the diagonal qubit pair whose purities
//! differ by a prescribed gap.

use num_complex::Complex64;

use crate::cap;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::tensor::{DensityMatrix, Matrix, UnitaryMatrix};

/// Haar-random unitary: Gram-Schmidt on the columns of a complex Ginibre
/// matrix. This is the QR factor whose `R` has a positive diagonal, which
/// makes the law exactly Haar. Each column is orthogonalized twice to keep
/// the result unitary to machine precision.
pub fn haar_unitary(dim: usize, rng: &mut StreamRng) -> UnitaryMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let g = Matrix::from_fn(dim, |_, _| rng.complex_gaussian());
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for q in &cols {
                let c: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "Ginibre matrix is singular");
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    UnitaryMatrix::from_trusted(Matrix::from_fn(dim, |i, j| cols[j][i]))
}

/// Haar-random unit vector: a normalized complex Gaussian vector.
pub fn haar_vector(dim: usize, rng: &mut StreamRng) -> Vec<Complex64> {
    assert!(dim >= 1, "state dimension must be positive");
    let v: Vec<Complex64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Haar-random pure state as a density matrix.
pub fn haar_state(dim: usize, rng: &mut StreamRng) -> DensityMatrix {
    let v = haar_vector(dim, rng);
    let mut m = Matrix::outer(&v);
    m.hermitize();
    DensityMatrix::from_trusted(m)
}

/// Parameters of the random induced state ensemble: the reduced state on
/// `n` qubits of a Haar state on `n` qubits plus an ancilla of dimension
/// `ancilla_dim`. The ensemble accuracy parameter is `1/ancilla_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InducedStateParams {
    pub n: usize,
    pub ancilla_dim: usize,
}

impl InducedStateParams {
    pub fn new(n: usize, ancilla_dim: usize) -> Result<Self> {
        let params = Self { n, ancilla_dim };
        params.validate()?;
        Ok(params)
    }

    pub fn system_dim(&self) -> usize {
        1usize << self.n
    }

    /// Total dimension `2^n · d_E` of the purified state.
    pub fn total_dim(&self) -> usize {
        self.system_dim() * self.ancilla_dim
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.ancilla_dim as f64
    }

    fn validate(&self) -> Result<()> {
        if self.ancilla_dim == 0 {
            return Err(Error::InvalidParameter("ancilla dimension must be at least 1".into()));
        }
        let total = cap::checked_pow(2, self.n)
            .and_then(|d| d.checked_mul(self.ancilla_dim))
            .ok_or(Error::CapExceeded { dim: usize::MAX, cap: cap::dim_cap() })?;
        cap::check_dim(total)
    }
}

/// Reduced state of a Haar vector on `system_dim · ancilla_dim`, tracing
/// out the ancilla (the trailing factor).
pub fn induced_state_of_dim(system_dim: usize, ancilla_dim: usize, rng: &mut StreamRng) -> DensityMatrix {
    let h = haar_vector(system_dim * ancilla_dim, rng);
    let mut m = Matrix::zeros(system_dim);
    for i in 0..system_dim {
        let hi = &h[i * ancilla_dim..(i + 1) * ancilla_dim];
        for j in i..system_dim {
            let hj = &h[j * ancilla_dim..(j + 1) * ancilla_dim];
            let v: Complex64 = hi.iter().zip(hj).map(|(a, b)| a * b.conj()).sum();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        m[(i, i)].im = 0.0;
    }
    DensityMatrix::from_trusted(m)
}

pub fn induced_state(params: &InducedStateParams, rng: &mut StreamRng) -> Result<DensityMatrix> {
    params.validate()?;
    Ok(induced_state_of_dim(params.system_dim(), params.ancilla_dim, rng))
}

/// `(1/r) Σ_i |ψ_i><ψ_i|` with `ψ_i` i.i.d. Haar on `dim` dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MixtureParams {
    pub dim: usize,
    pub components: usize,
}

pub fn convex_mixture(params: &MixtureParams, rng: &mut StreamRng) -> Result<DensityMatrix> {
    if params.components == 0 {
        return Err(Error::InvalidParameter("a mixture needs at least one component".into()));
    }
    if params.dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    cap::check_dim(params.dim)?;
    let d = params.dim;
    let mut acc = Matrix::zeros(d);
    for _ in 0..params.components {
        let v = haar_vector(d, rng);
        for i in 0..d {
            for j in 0..d {
                acc[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    let mut m = acc.scale_real(1.0 / params.components as f64);
    m.hermitize();
    Ok(DensityMatrix::from_trusted(m))
}

/// `U rho U^dagger` for a fresh Haar `U`.
pub fn conjugated(rho: &DensityMatrix, rng: &mut StreamRng) -> DensityMatrix {
    let u = haar_unitary(rho.dim(), rng);
    rho.conjugate(&u)
}

/// Diagonal qubit states `diag(1/3, 2/3)` and `diag(1/3+δ, 2/3-δ)` with
/// `δ = 1/6 - sqrt(1/36 - ε)`, whose purities differ by exactly `2ε`.
/// Requires `0 ≤ ε ≤ 1/36`.
pub fn qubit_purity_gap_pair(epsilon: f64) -> Result<(DensityMatrix, DensityMatrix)> {
    if !(0.0..=1.0 / 36.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1/36]")));
    }
    let delta = purity_gap_shift(epsilon);
    let rho0 = DensityMatrix::diagonal(&[1.0 / 3.0, 2.0 / 3.0])?;
    let rho1 = DensityMatrix::diagonal(&[1.0 / 3.0 + delta, 2.0 / 3.0 - delta])?;
    Ok((rho0, rho1))
}

pub fn purity_gap_shift(epsilon: f64) -> f64 {
    1.0 / 6.0 - (1.0 / 36.0 - epsilon).max(0.0).sqrt()
}
