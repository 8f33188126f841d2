//! Where the parties' states come from.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use num_complex::Complex64;

use dipesim_core::ensembles::{convex_mixture, haar_state, induced_state, InducedStateParams, MixtureParams};
use dipesim_core::rng::derive_seed;
use dipesim_core::{cap, DensityMatrix, Matrix, StreamRng};

/// A state family, parsed from `haar`, `induced:<d_E>`, `mixture:<r>`,
/// `file:<path>`, `mixed`, `pure-basis[:<b>]` or `same`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSource {
    /// Haar-random pure state.
    Haar,
    /// Reduced state of a Haar state with a `d_E`-dimensional ancilla.
    Induced(usize),
    /// Uniform mixture of `r` Haar-random pure states.
    Mixture(usize),
    /// Density matrix read from a text file.
    File(PathBuf),
    /// `I / 2^n`.
    Mixed,
    /// Computational basis state `|b><b|`.
    PureBasis(usize),
    /// Bob's state equals Alice's (only valid for the second state).
    Same,
}

impl FromStr for StateSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let count = |what: &str| -> Result<usize, String> {
            let raw = arg.ok_or_else(|| format!("'{head}' needs a value, as in {head}:{what}"))?;
            let v: usize = raw.parse().map_err(|e| format!("{head}:{raw}: {e}"))?;
            if v == 0 {
                return Err(format!("{head}:{raw}: must be at least 1"));
            }
            Ok(v)
        };
        let no_arg = |src: StateSource| match arg {
            None => Ok(src),
            Some(_) => Err(format!("'{head}' takes no value")),
        };
        match head {
            "haar" => no_arg(StateSource::Haar),
            "mixed" => no_arg(StateSource::Mixed),
            "same" => no_arg(StateSource::Same),
            "induced" => Ok(StateSource::Induced(count("d_E")?)),
            "mixture" => Ok(StateSource::Mixture(count("r")?)),
            "pure-basis" => match arg {
                None => Ok(StateSource::PureBasis(0)),
                Some(raw) => raw.parse().map(StateSource::PureBasis).map_err(|e| format!("pure-basis:{raw}: {e}")),
            },
            "file" => match arg {
                Some(p) if !p.is_empty() => Ok(StateSource::File(PathBuf::from(p))),
                _ => Err("file: needs a path, as in file:rho.txt".into()),
            },
            _ => Err(format!(
                "unknown state source '{s}'; expected haar, induced:<d_E>, mixture:<r>, file:<path>, mixed, pure-basis[:<b>] or same"
            )),
        }
    }
}

impl fmt::Display for StateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSource::Haar => f.write_str("haar"),
            StateSource::Induced(de) => write!(f, "induced:{de}"),
            StateSource::Mixture(r) => write!(f, "mixture:{r}"),
            StateSource::File(p) => write!(f, "file:{}", p.display()),
            StateSource::Mixed => f.write_str("mixed"),
            StateSource::PureBasis(b) => write!(f, "pure-basis:{b}"),
            StateSource::Same => f.write_str("same"),
        }
    }
}

/// Which party a state is drawn for; each gets its own random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Alice = 0,
    Bob = 1,
}

/// Sub-seed index reserved for state preparation, so states never share a
/// stream with protocol randomness derived from the same master seed.
const STATE_SEED_INDEX: u64 = 0x5747_4154_4553;

/// The random stream a party's state is drawn from under `seed`.
pub fn state_rng(seed: u64, role: Role) -> StreamRng {
    StreamRng::new(derive_seed(seed, STATE_SEED_INDEX), role as u64)
}

impl StateSource {
    /// An `n`-qubit state from this source, drawn with `rng` if random.
    pub fn build(&self, n: usize, rng: &mut StreamRng) -> Result<DensityMatrix> {
        let dim = cap::check_power(2, n)?;
        Ok(match self {
            StateSource::Haar => haar_state(dim, rng),
            StateSource::Induced(de) => induced_state(&InducedStateParams::new(n, *de)?, rng)?,
            StateSource::Mixture(r) => convex_mixture(&MixtureParams { dim, components: *r }, rng)?,
            StateSource::File(path) => {
                let rho = read_state_file(path)?;
                if rho.dim() != dim {
                    anyhow::bail!(crate::UsageError::new(format!(
                        "{} holds a {}-dimensional state, expected {dim} for n = {n}",
                        path.display(),
                        rho.dim()
                    )));
                }
                rho
            }
            StateSource::Mixed => DensityMatrix::maximally_mixed(dim),
            StateSource::PureBasis(b) => {
                if *b >= dim {
                    anyhow::bail!(crate::UsageError::new(format!("basis index {b} out of range for n = {n}")));
                }
                DensityMatrix::basis(dim, *b)
            }
            StateSource::Same => {
                anyhow::bail!(crate::UsageError::new("'same' only makes sense for the second state".to_string()))
            }
        })
    }

    /// Alice's and Bob's states under `seed`. `Same` for Bob reuses Alice's.
    pub fn build_pair(a: &StateSource, b: &StateSource, n: usize, seed: u64) -> Result<(DensityMatrix, DensityMatrix)> {
        let rho = a.build(n, &mut state_rng(seed, Role::Alice))?;
        let sigma = match b {
            StateSource::Same => rho.clone(),
            other => other.build(n, &mut state_rng(seed, Role::Bob))?,
        };
        Ok((rho, sigma))
    }
}

/// Reads a density matrix: one row per line, whitespace-separated complex
/// entries such as `0.5`, `0.25-0.1i` or `1e-3i`. `#` starts a comment line.
pub fn read_state_file(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading state file {}", path.display()))?;
    parse_state(&text).with_context(|| format!("in state file {}", path.display()))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Complex64>()
                    .map_err(|_| crate::UsageError::new(format!("cannot parse '{tok}' as a complex number")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        anyhow::bail!(crate::UsageError::new("the matrix must be square and non-empty".to_string()));
    }
    cap::check_dim(d)?;
    let m = Matrix::from_vec(d, rows.into_iter().flatten().collect())?;
    Ok(DensityMatrix::new(m)?)
}
