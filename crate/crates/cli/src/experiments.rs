//! Experiment drivers behind the subcommands. They return rows instead of
//! writing them, so the acceptance suite can call them directly.

use std::str::FromStr;
use std::time::Instant;

use anyhow::Result;
use rayon::prelude::*;

use dipesim_core::identities::{CheckKind, CheckParams, CheckRegistry};
use dipesim_core::oracles::{inner_product, purity};
use dipesim_core::protocols::params::{collision_batch_size, collision_budget, partial_swap_budget};
use dipesim_core::protocols::{choose_params, ProtocolConfig, ProtocolRegistry, Run};
use dipesim_core::rng::derive_seed;
use dipesim_core::{stats, DensityMatrix, StreamRng};

use crate::records::{CheckRecord, DistinguishRecord, RunRecord, SweepRecord};
use crate::source::{state_rng, Role, StateSource};
use crate::UsageError;

/// Explicit sizes that override the budgets derived from `epsilon`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub n_batches: Option<usize>,
    pub copies_per_batch: Option<usize>,
    pub fk_copies: Option<usize>,
}

impl Budget {
    fn apply(&self, config: &mut ProtocolConfig) {
        if let Some(v) = self.n_batches {
            config.n_batches = v;
        }
        if let Some(v) = self.copies_per_batch {
            config.copies_per_batch = v;
        }
        if let Some(v) = self.fk_copies {
            config.fk_copies = v;
        }
    }
}

/// Resolves a registered protocol name into the protocol that will actually
/// run and its configuration. Sizes not fixed by `budget` come from the
/// `epsilon`-dependent budgets scaled by `calibration`; `auto` picks the
/// cheaper estimator.
pub fn plan(
    protocol: &str,
    n: usize,
    k: usize,
    epsilon: f64,
    calibration: f64,
    budget: &Budget,
    seed: u64,
) -> Result<(String, ProtocolConfig)> {
    if k > n {
        return Err(UsageError::new(format!("k = {k} exceeds n = {n}")).into());
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(calibration > 0.0 && calibration.is_finite()) {
        return Err(UsageError::new("epsilon and the calibration constant must be positive".to_string()).into());
    }
    let fk_default = (calibration / (epsilon * epsilon)).ceil() as usize;
    let (name, mut config) = match protocol {
        "auto" => {
            let c = choose_params(n, k, epsilon, calibration)?;
            let name = c.branch.map_or("alg1", |b| b.protocol_name());
            (name.to_string(), c)
        }
        "alg1" => {
            let total = collision_budget(n, epsilon, calibration);
            let m = collision_batch_size(n, total);
            ("alg1".into(), ProtocolConfig::new(n, k, total.div_ceil(m), m, 0, 0))
        }
        "alg2" | "purity" => {
            let n_b = partial_swap_budget(n, k, epsilon, calibration);
            (protocol.into(), ProtocolConfig::new(n, k, n_b, 1, fk_default, 0))
        }
        "swap" => ("swap".into(), ProtocolConfig::new(n, k, fk_default, 1, 0, 0)),
        other => {
            ProtocolRegistry::with_defaults().get(other)?;
            (other.into(), ProtocolConfig::new(n, k, fk_default, 1, fk_default, 0))
        }
    };
    budget.apply(&mut config);
    config.epsilon = epsilon;
    config.master_seed = seed;
    config.validate()?;
    Ok((name, config))
}

/// The quantity `protocol` estimates, computed exactly.
pub fn exact_value(protocol: &str, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(match protocol {
        "purity" => purity(rho)?,
        _ => inner_product(rho, sigma)?,
    })
}

pub fn run_protocol(
    protocol: &str,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    config: &ProtocolConfig,
) -> Result<Run> {
    Ok(ProtocolRegistry::with_defaults().get(protocol)?.run(rho, sigma, config)?)
}

/// Seed the protocol uses for run `index` under a master seed.
pub fn run_seed(master: u64, index: u64) -> u64 {
    derive_seed(master, index)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateSpec {
    pub protocol: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub calibration: f64,
    pub budget: Budget,
    pub state_a: StateSource,
    pub state_b: StateSource,
    pub seed: u64,
    pub runs: usize,
}

/// `runs` independent runs on one state pair drawn from `seed`. Run `i`
/// uses protocol seed [`run_seed`]`(seed, i)`.
pub fn estimate(spec: &EstimateSpec) -> Result<Vec<RunRecord>> {
    let (rho, sigma) = StateSource::build_pair(&spec.state_a, &spec.state_b, spec.n, spec.seed)?;
    let (name, base) = plan(&spec.protocol, spec.n, spec.k, spec.epsilon, spec.calibration, &spec.budget, spec.seed)?;
    let exact = exact_value(&name, &rho, &sigma)?;
    (0..spec.runs as u64)
        .into_par_iter()
        .map(|i| {
            let config = base.clone().with_seed(run_seed(spec.seed, i));
            let start = Instant::now();
            let run = run_protocol(&name, &rho, &sigma, &config)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(RunRecord {
                run_id: i,
                protocol: name.clone(),
                n: config.n,
                k: config.k,
                epsilon: config.epsilon,
                n_b: config.n_batches,
                m: config.copies_per_batch,
                n_k: config.fk_copies,
                seed: spec.seed,
                estimate: run.estimate.value,
                stderr: run.estimate.stderr,
                exact,
                abs_error: (run.estimate.value - exact).abs(),
                wall_ms,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// `Var(w_i)` against `k` at fixed batch size.
    Variance,
    /// Absolute error against the total copy count `N = N_b · m`.
    Error,
    /// Success rate at the `choose_params` budgets over an `(k, epsilon)` grid.
    Epsilon,
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "variance" => Ok(SweepKind::Variance),
            "error" => Ok(SweepKind::Error),
            "epsilon" => Ok(SweepKind::Epsilon),
            _ => Err(format!("unknown sweep '{s}', expected variance, error or epsilon")),
        }
    }
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Variance => "variance",
            SweepKind::Error => "error",
            SweepKind::Epsilon => "epsilon",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub protocol: String,
    pub n: usize,
    pub ks: Vec<usize>,
    pub epsilons: Vec<f64>,
    /// Total copy counts for the error sweep.
    pub totals: Vec<usize>,
    pub calibration: f64,
    pub budget: Budget,
    pub reps: usize,
    pub state_a: StateSource,
    pub state_b: StateSource,
    pub seed: u64,
}

struct RepOutcome {
    exact: f64,
    estimate: f64,
    variance: Option<f64>,
    variance_stderr: Option<f64>,
}

/// Runs every `(cell, repetition)` pair on the worker pool and emits one row
/// per cell in grid order. Repetition `r` draws its states and protocol
/// randomness from `derive_seed(seed, r)`, the same in every cell.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    if spec.reps == 0 {
        return Err(UsageError::new("need at least one repetition".to_string()).into());
    }
    let first_eps = *spec.epsilons.first().ok_or_else(|| UsageError::new("no epsilon given".to_string()))?;
    let first_k = *spec.ks.first().ok_or_else(|| UsageError::new("no k given".to_string()))?;
    let mut cells: Vec<(String, ProtocolConfig)> = Vec::new();
    match spec.kind {
        SweepKind::Variance => {
            for &k in &spec.ks {
                let budget = Budget { copies_per_batch: spec.budget.copies_per_batch.or(Some(1)), ..spec.budget };
                cells.push(plan(&spec.protocol, spec.n, k, first_eps, spec.calibration, &budget, spec.seed)?);
            }
        }
        SweepKind::Error => {
            if spec.totals.is_empty() {
                return Err(UsageError::new("the error sweep needs --totals".to_string()).into());
            }
            let m = spec.budget.copies_per_batch.unwrap_or(1);
            for &total in &spec.totals {
                let budget = Budget {
                    n_batches: Some(total.div_ceil(m)),
                    copies_per_batch: Some(m),
                    fk_copies: spec.budget.fk_copies.or(Some(total)),
                };
                cells.push(plan(&spec.protocol, spec.n, first_k, first_eps, spec.calibration, &budget, spec.seed)?);
            }
        }
        SweepKind::Epsilon => {
            for &k in &spec.ks {
                for &eps in &spec.epsilons {
                    cells.push(plan(&spec.protocol, spec.n, k, eps, spec.calibration, &spec.budget, spec.seed)?);
                }
            }
        }
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..spec.reps).map(move |r| (c, r))).collect();
    let outcomes: Vec<RepOutcome> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let (name, base) = &cells[c];
            let trial = derive_seed(spec.seed, r as u64);
            let (rho, sigma) = StateSource::build_pair(&spec.state_a, &spec.state_b, spec.n, trial)?;
            let run = run_protocol(name, &rho, &sigma, &base.clone().with_seed(trial))?;
            Ok(RepOutcome {
                exact: exact_value(name, &rho, &sigma)?,
                estimate: run.estimate.value,
                variance: stats::sample_variance(&run.batch_values),
                variance_stderr: stats::variance_standard_error(&run.batch_values),
            })
        })
        .collect::<Result<_>>()?;
    Ok(cells
        .iter()
        .zip(outcomes.chunks(spec.reps))
        .map(|((name, config), reps)| summarize(spec, name, config, reps))
        .collect())
}

fn summarize(spec: &SweepSpec, name: &str, config: &ProtocolConfig, reps: &[RepOutcome]) -> SweepRecord {
    let errors: Vec<f64> = reps.iter().map(|r| (r.estimate - r.exact).abs()).collect();
    let successes = errors.iter().filter(|&&e| e <= config.epsilon).count();
    let variances: Vec<f64> = reps.iter().filter_map(|r| r.variance).collect();
    let var_w = if variances.is_empty() { f64::NAN } else { stats::mean(&variances) };
    SweepRecord {
        sweep: spec.kind.name().into(),
        protocol: name.into(),
        n: config.n,
        k: config.k,
        epsilon: config.epsilon,
        n_b: config.n_batches,
        m: config.copies_per_batch,
        n_k: config.fk_copies,
        total_copies: config.batch_copies(),
        reps: reps.len(),
        seed: spec.seed,
        mean_exact: stats::mean(&reps.iter().map(|r| r.exact).collect::<Vec<_>>()),
        mean_estimate: stats::mean(&reps.iter().map(|r| r.estimate).collect::<Vec<_>>()),
        mean_abs_error: stats::mean(&errors),
        success_rate: successes as f64 / reps.len() as f64,
        var_w,
        var_w_stderr: match reps {
            [single] => single.variance_stderr,
            _ => stats::standard_error(&variances),
        },
        log2_var_w: var_w.log2(),
    }
}

/// Least-squares slope of `log2_var_w` against `k` over variance-sweep rows.
pub fn variance_slope(rows: &[SweepRecord]) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.log2_var_w).collect();
    stats::linear_fit(&x, &y).0
}

/// State families for the distinguishing experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    /// Maximally mixed state against random induced states with ancilla
    /// dimension `1/epsilon`, decided from a purity estimate.
    Induced,
    /// Same versus independent Haar conjugates of a fixed rank-`r` state,
    /// decided from an inner-product estimate.
    FixedSpectrum,
    /// Same versus independent uniform mixtures of `r` Haar states.
    HaarMixture,
}

impl FromStr for Ensemble {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "induced" => Ok(Ensemble::Induced),
            "dipe1" => Ok(Ensemble::FixedSpectrum),
            "dipe2" => Ok(Ensemble::HaarMixture),
            _ => Err(format!("unknown ensemble '{s}', expected induced, dipe1 or dipe2")),
        }
    }
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Induced => "induced",
            Ensemble::FixedSpectrum => "dipe1",
            Ensemble::HaarMixture => "dipe2",
        }
    }
}

/// Which hypothesis holds in each trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    /// Fair coin per trial.
    Coin,
    /// Always the null case: the maximally mixed state, or identical states.
    Null,
    /// Always the alternative.
    Alternative,
}

impl FromStr for Truth {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "coin" => Ok(Truth::Coin),
            "null" => Ok(Truth::Null),
            "alternative" => Ok(Truth::Alternative),
            _ => Err(format!("unknown truth '{s}', expected coin, null or alternative")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishSpec {
    pub ensemble: Ensemble,
    /// Protocol; `None` uses `purity` for the induced ensemble and `alg1`
    /// for the others.
    pub protocol: Option<String>,
    pub n: usize,
    pub epsilon: f64,
    /// Mixture rank for the `dipe` ensembles.
    pub rank: usize,
    /// Quantum memory; `None` means `n`.
    pub k: Option<usize>,
    pub calibration: f64,
    pub budget: Budget,
    pub trials: usize,
    pub truth: Truth,
    /// Replace the estimate by the exact value.
    pub oracle: bool,
    pub seed: u64,
}

/// The induced-ensemble ancilla dimension `1/epsilon`, which must be a
/// positive integer.
fn ancilla_dim(epsilon: f64) -> Result<usize> {
    let inv = 1.0 / epsilon;
    let de = inv.round();
    if !inv.is_finite() || de < 1.0 || (inv - de).abs() > 1e-9 {
        return Err(UsageError::new(format!("1/epsilon must be a positive integer, got {inv}")).into());
    }
    Ok(de as usize)
}

/// Runs the decision rule over `trials` independent trials.
///
/// Induced ensemble: estimate the purity to accuracy `epsilon/3` and answer
/// "maximally mixed" when it is below `2^-n + epsilon/3`. The `dipe`
/// ensembles: estimate `tr(rho sigma)` to accuracy `epsilon` and answer
/// "same" when it exceeds the midpoint between the expected overlaps of the
/// two cases.
pub fn distinguish(spec: &DistinguishSpec) -> Result<DistinguishRecord> {
    let n = spec.n;
    let d = dipesim_core::cap::check_power(2, n)? as f64;
    let k = spec.k.unwrap_or(n);
    let (accuracy, threshold, default_protocol) = match spec.ensemble {
        Ensemble::Induced => {
            ancilla_dim(spec.epsilon)?;
            (spec.epsilon / 3.0, 1.0 / d + spec.epsilon / 3.0, "purity")
        }
        Ensemble::FixedSpectrum | Ensemble::HaarMixture => {
            if spec.rank == 0 || spec.rank as f64 > d {
                return Err(UsageError::new(format!("rank must lie in 1..={d}")).into());
            }
            let r = spec.rank as f64;
            let same = match spec.ensemble {
                Ensemble::FixedSpectrum => 1.0 / r,
                _ => 1.0 / r + (1.0 - 1.0 / r) / d,
            };
            (spec.epsilon, 0.5 * (same + 1.0 / d), "alg1")
        }
    };
    let protocol = spec.protocol.as_deref().unwrap_or(default_protocol);
    let (name, base) = plan(protocol, n, k, accuracy, spec.calibration, &spec.budget, spec.seed)?;
    let wins: Vec<bool> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial = derive_seed(spec.seed, t);
            let mut rng = StreamRng::new(derive_seed(trial, 1), 0);
            let null = match spec.truth {
                Truth::Coin => rng.bernoulli(0.5),
                Truth::Null => true,
                Truth::Alternative => false,
            };
            let (rho, sigma) = trial_states(spec, null, trial)?;
            let value = if spec.oracle {
                exact_value(&name, &rho, &sigma)?
            } else {
                run_protocol(&name, &rho, &sigma, &base.clone().with_seed(trial))?.estimate.value
            };
            let says_null = match spec.ensemble {
                Ensemble::Induced => value < threshold,
                _ => value > threshold,
            };
            Ok(says_null == null)
        })
        .collect::<Result<_>>()?;
    let successes = wins.iter().filter(|&&w| w).count();
    Ok(DistinguishRecord {
        ensemble: spec.ensemble.name().into(),
        protocol: name,
        n,
        epsilon: spec.epsilon,
        rank: match spec.ensemble {
            Ensemble::Induced => ancilla_dim(spec.epsilon)?,
            _ => spec.rank,
        },
        k: base.k,
        n_b: base.n_batches,
        m: base.copies_per_batch,
        n_k: base.fk_copies,
        trials: spec.trials,
        seed: spec.seed,
        oracle: spec.oracle,
        threshold,
        successes,
        success_rate: successes as f64 / spec.trials.max(1) as f64,
    })
}

fn trial_states(spec: &DistinguishSpec, null: bool, trial: u64) -> Result<(DensityMatrix, DensityMatrix)> {
    let n = spec.n;
    let mut a = state_rng(trial, Role::Alice);
    let mut b = state_rng(trial, Role::Bob);
    Ok(match spec.ensemble {
        Ensemble::Induced => {
            let rho = if null {
                StateSource::Mixed.build(n, &mut a)?
            } else {
                StateSource::Induced(ancilla_dim(spec.epsilon)?).build(n, &mut a)?
            };
            (rho.clone(), rho)
        }
        Ensemble::FixedSpectrum => {
            let dim = 1usize << n;
            let spectrum: Vec<f64> =
                (0..dim).map(|i| if i < spec.rank { 1.0 / spec.rank as f64 } else { 0.0 }).collect();
            let base = DensityMatrix::diagonal(&spectrum)?;
            let rho = dipesim_core::ensembles::conjugated(&base, &mut a);
            let sigma = if null { rho.clone() } else { dipesim_core::ensembles::conjugated(&base, &mut b) };
            (rho, sigma)
        }
        Ensemble::HaarMixture => {
            let source = StateSource::Mixture(spec.rank);
            let rho = source.build(n, &mut a)?;
            let sigma = if null { rho.clone() } else { source.build(n, &mut b)? };
            (rho, sigma)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckSelection {
    /// Every grid point of every check of a kind (`None` = all kinds).
    Suite(Option<CheckKind>),
    /// One check: its grid when `params` is empty, else a single report.
    Named { name: String, params: CheckParams },
}

/// Runs the selected checks once per seed `derive_seed(seed, s)`,
/// `s < seeds`, on the worker pool; rows come back in a fixed order.
pub fn run_checks(selection: &CheckSelection, seed: u64, seeds: usize) -> Result<Vec<CheckRecord>> {
    let registry = CheckRegistry::with_defaults();
    let mut jobs: Vec<(&str, CheckParams)> = Vec::new();
    match selection {
        CheckSelection::Suite(kind) => {
            for check in registry.iter().filter(|c| kind.is_none_or(|k| c.kind() == k)) {
                jobs.extend(check.grid().into_iter().map(|p| (check.name(), p)));
            }
        }
        CheckSelection::Named { name, params } => {
            let check = registry.get(name)?;
            if params.iter().next().is_none() {
                jobs.extend(check.grid().into_iter().map(|p| (check.name(), p)));
            } else {
                jobs.push((check.name(), params.clone()));
            }
        }
    }
    let indexed: Vec<(usize, usize)> = (0..seeds).flat_map(|s| (0..jobs.len()).map(move |j| (s, j))).collect();
    indexed
        .par_iter()
        .map(|&(s, j)| {
            let (name, params) = &jobs[j];
            let check = registry.get(name)?;
            let run_seed = derive_seed(derive_seed(seed, s as u64), j as u64);
            let report = check.run(params, run_seed)?;
            Ok(CheckRecord {
                name: report.name.clone(),
                kind: check.kind().label().into(),
                params: report.params.clone(),
                residual: report.residual,
                threshold: report.threshold,
                passed: report.passed,
                samples: report.samples,
                seed: run_seed,
            })
        })
        .collect()
}
