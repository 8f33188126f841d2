//! Flag definitions and command handlers.
//!
//! Every option can also be set in a `--config` file under its long name
//! (`fk-copies = 100`); flags win over the file, the file wins over the
//! built-in defaults.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use dipesim_core::identities::{CheckKind, CheckParams, CheckRegistry};
use dipesim_core::oracles::inner_product;
use dipesim_core::protocols::{ProtocolRegistry, DEFAULT_CALIBRATION};
use dipesim_core::DensityMatrix;
use dipesim_netsim::{run_alice, BobListener, ChannelLedger, WireProtocol};

use crate::experiments::{
    self, run_seed, Budget, CheckSelection, DistinguishSpec, Ensemble, EstimateSpec, SweepKind, SweepSpec, Truth,
};
use crate::records::{CsvSink, NetRecord};
use crate::settings::{ConfigFile, List};
use crate::source::{state_rng, Role, StateSource};
use crate::UsageError;

#[derive(Debug, Parser)]
#[command(name = "dipesim", version, about = "Simulate distributed inner-product and purity estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a protocol on a pair of states and write one row per run.
    Estimate(EstimateArgs),
    /// Run a parameter grid: variance vs k, error vs N, or success vs epsilon.
    Sweep(SweepArgs),
    /// Run identity checks and write one row per report.
    Check(CheckArgs),
    /// Run a distinguishing experiment and write its success rate.
    Distinguish(DistinguishArgs),
    /// Play Alice: connect to Bob and stream a session.
    Alice(AliceArgs),
    /// Play Bob: accept one session from Alice and write the estimate.
    Bob(BobArgs),
    /// List the registered protocols and identity checks.
    List,
}

#[derive(Debug, Args)]
pub struct Common {
    /// File of key=value settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; drawn from the OS and recorded in the output when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output, appended to; standard output when absent or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    /// Number of batches N_b.
    #[arg(long)]
    pub batches: Option<usize>,
    /// Copies per batch m.
    #[arg(long)]
    pub copies: Option<usize>,
    /// Copies for the prefix-overlap phase N_k.
    #[arg(long = "fk-copies")]
    pub fk_copies: Option<usize>,
    /// Constant multiplying the epsilon-derived budgets.
    #[arg(long)]
    pub calibration: Option<f64>,
}

const SIZE_KEYS: [&str; 4] = ["batches", "copies", "fk-copies", "calibration"];
const COMMON_KEYS: [&str; 2] = ["seed", "out"];

impl SizeArgs {
    fn resolve(&self, file: &ConfigFile) -> Result<(Budget, f64)> {
        let budget = Budget {
            n_batches: file.pick(self.batches, "batches")?,
            copies_per_batch: file.pick(self.copies, "copies")?,
            fk_copies: file.pick(self.fk_copies, "fk-copies")?,
        };
        Ok((budget, file.pick_or(self.calibration, "calibration", DEFAULT_CALIBRATION)?))
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    /// alg1, alg2, purity, swap or auto.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Qubits per party.
    #[arg(long)]
    pub n: Option<usize>,
    /// Qubits of one-way quantum communication per copy.
    #[arg(long)]
    pub k: Option<usize>,
    /// Target additive error; sets the default budget.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub sizes: SizeArgs,
    /// Alice's state: haar, induced:<d_E>, mixture:<r>, file:<path>, mixed, pure-basis[:<b>].
    #[arg(long = "state-a")]
    pub state_a: Option<StateSource>,
    /// Bob's state; also accepts `same`.
    #[arg(long = "state-b")]
    pub state_b: Option<StateSource>,
    /// Independent runs on the same state pair.
    #[arg(long)]
    pub runs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// variance, error or epsilon.
    #[arg(long)]
    pub kind: Option<SweepKind>,
    /// Protocol; alg2 for variance and error sweeps, auto for epsilon sweeps.
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated k values.
    #[arg(long)]
    pub k: Option<List<usize>>,
    /// Comma-separated epsilon values.
    #[arg(long)]
    pub epsilon: Option<List<f64>>,
    /// Comma-separated total copy counts N for the error sweep.
    #[arg(long)]
    pub totals: Option<List<usize>>,
    #[command(flatten)]
    pub sizes: SizeArgs,
    /// Repetitions per grid cell.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long = "state-a")]
    pub state_a: Option<StateSource>,
    #[arg(long = "state-b")]
    pub state_b: Option<StateSource>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// exact, mc or all.
    #[arg(long, conflicts_with = "name")]
    pub suite: Option<String>,
    /// A single check; runs its grid unless parameters are given.
    #[arg(long)]
    pub name: Option<String>,
    /// Check parameter, repeatable: --param key=value.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Shorthand for --param d=<d>.
    #[arg(long)]
    pub d: Option<usize>,
    /// Shorthand for --param de=<d_E>.
    #[arg(long)]
    pub de: Option<usize>,
    /// Shorthand for --param T=<T>.
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Repeat everything under this many derived seeds.
    #[arg(long)]
    pub seeds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DistinguishArgs {
    #[command(flatten)]
    pub common: Common,
    /// induced, dipe1 or dipe2.
    #[arg(long)]
    pub ensemble: Option<Ensemble>,
    /// Estimator; purity for induced, alg1 otherwise.
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Purity gap for induced (1/epsilon = ancilla dimension); accuracy for dipe.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Mixture rank for dipe1 / dipe2.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Quantum memory in qubits; defaults to n.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub sizes: SizeArgs,
    #[arg(long)]
    pub trials: Option<usize>,
    /// coin, null or alternative.
    #[arg(long)]
    pub truth: Option<Truth>,
    /// Decide from the exact value instead of an estimate.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct AliceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Bob's address, host:port.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// alg1 or alg2.
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub sizes: SizeArgs,
    #[arg(long = "state-a")]
    pub state_a: Option<StateSource>,
    /// Seconds to wait for Bob and for each I/O operation.
    #[arg(long)]
    pub timeout: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BobArgs {
    #[command(flatten)]
    pub common: Common,
    /// Address to listen on, host:port; port 0 picks a free port.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Bob's state; `same` rebuilds Alice's from --state-a and --seed.
    #[arg(long = "state-b")]
    pub state_b: Option<StateSource>,
    /// Alice's state source, used for `same` and for the exact column.
    #[arg(long = "state-a")]
    pub state_a: Option<StateSource>,
    /// Seconds to wait for Alice and for each read.
    #[arg(long)]
    pub timeout: Option<f64>,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Sweep(a) => sweep(a),
        Command::Check(a) => check(a),
        Command::Distinguish(a) => distinguish(a),
        Command::Alice(a) => alice(a),
        Command::Bob(a) => bob(a),
        Command::List => {
            println!("protocols:");
            for p in ProtocolRegistry::with_defaults().iter() {
                println!("  {:<8} {}", p.name(), p.description());
            }
            println!("checks:");
            for c in CheckRegistry::with_defaults().iter() {
                println!("  {:<26} [{}] {}", c.name(), c.kind().label(), c.description());
            }
            Ok(())
        }
    }
}

fn load(common: &Common, keys: &[&str]) -> Result<ConfigFile> {
    let file = ConfigFile::load_optional(common.config.as_deref())?;
    let mut allowed: Vec<&str> = keys.to_vec();
    allowed.extend(COMMON_KEYS);
    file.restrict_to(&allowed)?;
    Ok(file)
}

fn seed(common: &Common, file: &ConfigFile) -> Result<u64> {
    Ok(match file.pick(common.seed, "seed")? {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("seed: {s}");
            s
        }
    })
}

fn sink(common: &Common, file: &ConfigFile) -> Result<CsvSink> {
    let out: Option<PathBuf> = file.pick(common.out.clone(), "out")?;
    CsvSink::open(out.as_deref())
}

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| UsageError::new(format!("--{key} is required (flag or config key '{key}')")).into())
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let mut keys = vec!["protocol", "n", "k", "epsilon", "state-a", "state-b", "runs"];
    keys.extend(SIZE_KEYS);
    let file = load(&a.common, &keys)?;
    let (budget, calibration) = a.sizes.resolve(&file)?;
    let spec = EstimateSpec {
        protocol: file.pick_or(a.protocol, "protocol", "auto".to_string())?,
        n: required(file.pick(a.n, "n")?, "n")?,
        k: file.pick_or(a.k, "k", 0)?,
        epsilon: file.pick_or(a.epsilon, "epsilon", 0.1)?,
        calibration,
        budget,
        state_a: file.pick_or(a.state_a, "state-a", StateSource::Haar)?,
        state_b: file.pick_or(a.state_b, "state-b", StateSource::Haar)?,
        seed: seed(&a.common, &file)?,
        runs: file.pick_or(a.runs, "runs", 1)?,
    };
    let rows = experiments::estimate(&spec)?;
    sink(&a.common, &file)?.write(&rows)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let mut keys = vec!["kind", "protocol", "n", "k", "epsilon", "totals", "reps", "state-a", "state-b", "threads"];
    keys.extend(SIZE_KEYS);
    let file = load(&a.common, &keys)?;
    let kind: SweepKind = required(file.pick(a.kind, "kind")?, "kind")?;
    let (budget, calibration) = a.sizes.resolve(&file)?;
    let default_protocol = if kind == SweepKind::Epsilon { "auto" } else { "alg2" };
    let spec = SweepSpec {
        kind,
        protocol: file.pick_or(a.protocol, "protocol", default_protocol.to_string())?,
        n: required(file.pick(a.n, "n")?, "n")?,
        ks: file.pick_or(a.k, "k", List(vec![0]))?.0,
        epsilons: file.pick_or(a.epsilon, "epsilon", List(vec![0.1]))?.0,
        totals: file.pick(a.totals, "totals")?.map(|l| l.0).unwrap_or_default(),
        calibration,
        budget,
        reps: file.pick_or(a.reps, "reps", if kind == SweepKind::Variance { 1 } else { 10 })?,
        state_a: file.pick_or(a.state_a, "state-a", StateSource::Haar)?,
        state_b: file.pick_or(a.state_b, "state-b", StateSource::Haar)?,
        seed: seed(&a.common, &file)?,
    };
    let threads: Option<usize> = file.pick(a.threads, "threads")?;
    let rows = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("starting the worker pool")?
            .install(|| experiments::sweep(&spec))?,
        None => experiments::sweep(&spec)?,
    };
    if kind == SweepKind::Variance && rows.len() >= 2 {
        eprintln!("log2 Var(w_i) vs k slope: {:.4}", experiments::variance_slope(&rows));
    }
    sink(&a.common, &file)?.write(&rows)
}

fn check(a: CheckArgs) -> Result<()> {
    let file = load(&a.common, &["suite", "name", "seeds", "d", "de", "T"])?;
    let suite: Option<String> = file.pick(a.suite, "suite")?;
    let name: Option<String> = file.pick(a.name, "name")?;
    let selection = match (suite, name) {
        (Some(_), Some(_)) => return Err(UsageError::new("give either --suite or --name, not both").into()),
        (_, Some(name)) => {
            let mut params = CheckParams::new();
            for raw in &a.params {
                let (k, v) = raw
                    .split_once('=')
                    .ok_or_else(|| UsageError::new(format!("--param expects key=value, got '{raw}'")))?;
                params.set(k.trim(), v.trim());
            }
            for (key, value) in
                [("d", file.pick(a.d, "d")?), ("de", file.pick(a.de, "de")?), ("T", file.pick(a.t, "T")?)]
            {
                if let Some(v) = value {
                    params.set(key, v);
                }
            }
            let name = match name.as_str() {
                "likelihood" => "likelihood_ratio".to_string(),
                _ => name,
            };
            CheckSelection::Named { name, params }
        }
        (suite, None) => {
            if !a.params.is_empty() || a.d.is_some() || a.de.is_some() || a.t.is_some() {
                return Err(UsageError::new("check parameters need --name").into());
            }
            CheckSelection::Suite(match suite.as_deref().unwrap_or("all") {
                "exact" => Some(CheckKind::Exact),
                "mc" => Some(CheckKind::MonteCarlo),
                "all" => None,
                other => {
                    return Err(UsageError::new(format!("unknown suite '{other}', expected exact, mc or all")).into())
                }
            })
        }
    };
    let seeds = file.pick_or(a.seeds, "seeds", 1)?;
    let rows = experiments::run_checks(&selection, seed(&a.common, &file)?, seeds)?;
    let passed = rows.iter().filter(|r| r.passed).count();
    eprintln!("{passed}/{} checks passed", rows.len());
    for r in rows.iter().filter(|r| !r.passed) {
        eprintln!("  failed: {} [{}] residual {:.3e} > {:.1e}", r.name, r.params, r.residual, r.threshold);
    }
    sink(&a.common, &file)?.write(&rows)
}

fn distinguish(a: DistinguishArgs) -> Result<()> {
    let mut keys = vec!["ensemble", "protocol", "n", "epsilon", "rank", "k", "trials", "truth", "oracle"];
    keys.extend(SIZE_KEYS);
    let file = load(&a.common, &keys)?;
    let (budget, calibration) = a.sizes.resolve(&file)?;
    let spec = DistinguishSpec {
        ensemble: file.pick_or(a.ensemble, "ensemble", Ensemble::Induced)?,
        protocol: file.pick(a.protocol, "protocol")?,
        n: required(file.pick(a.n, "n")?, "n")?,
        epsilon: file.pick_or(a.epsilon, "epsilon", 0.5)?,
        rank: file.pick_or(a.rank, "rank", 1)?,
        k: file.pick(a.k, "k")?,
        calibration,
        budget,
        trials: file.pick_or(a.trials, "trials", 200)?,
        truth: file.pick_or(a.truth, "truth", Truth::Coin)?,
        oracle: a.oracle || file.get::<bool>("oracle")?.unwrap_or(false),
        seed: seed(&a.common, &file)?,
    };
    let row = experiments::distinguish(&spec)?;
    eprintln!("success rate {}/{} = {:.4}", row.successes, row.trials, row.success_rate);
    sink(&a.common, &file)?.write(&[row])
}

fn timeout(flag: Option<f64>, file: &ConfigFile) -> Result<Duration> {
    let secs = file.pick_or(flag, "timeout", dipesim_netsim::DEFAULT_TIMEOUT.as_secs_f64())?;
    Duration::try_from_secs_f64(secs)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| UsageError::new(format!("timeout must be a positive number of seconds, got {secs}")).into())
}

fn wire_protocol(name: &str) -> Result<WireProtocol> {
    WireProtocol::from_name(name)
        .ok_or_else(|| UsageError::new(format!("networked runs support alg1 and alg2, got '{name}'")).into())
}

fn net_record(role: &str, protocol: WireProtocol, hello: &dipesim_netsim::Hello, ledger: &ChannelLedger) -> NetRecord {
    NetRecord {
        role: role.into(),
        protocol: protocol.name().into(),
        n: hello.n as usize,
        k: hello.k as usize,
        n_b: hello.n_batches as usize,
        m: hello.copies_per_batch as usize,
        n_k: hello.fk_copies as usize,
        seed: 0,
        protocol_seed: hello.seed,
        estimate: None,
        stderr: None,
        exact: None,
        classical_bytes: ledger.classical_bytes,
        quantum_payload_bytes: ledger.quantum_payload_bytes,
        quantum_qubits_sent: ledger.quantum_qubits_sent,
        qstate_frames: ledger.qstate_frames,
        frames_alice_to_bob: ledger.frames_alice_to_bob,
        frames_bob_to_alice: ledger.frames_bob_to_alice,
        wall_ms: 0.0,
    }
}

/// Alice's session uses protocol seed `run_seed(seed, 0)` and the state
/// drawn from `seed`, so it reproduces run 0 of `estimate` with the same
/// flags.
fn alice(a: AliceArgs) -> Result<()> {
    let mut keys = vec!["endpoint", "protocol", "n", "k", "epsilon", "state-a", "timeout"];
    keys.extend(SIZE_KEYS);
    let file = load(&a.common, &keys)?;
    let endpoint: String = required(file.pick(a.endpoint, "endpoint")?, "endpoint")?;
    let protocol_name: String = file.pick_or(a.protocol, "protocol", "alg2".to_string())?;
    let protocol = wire_protocol(&protocol_name)?;
    let n = required(file.pick(a.n, "n")?, "n")?;
    let (budget, calibration) = a.sizes.resolve(&file)?;
    let master = seed(&a.common, &file)?;
    let (_, config) = experiments::plan(
        protocol.name(),
        n,
        file.pick_or(a.k, "k", 0)?,
        file.pick_or(a.epsilon, "epsilon", 0.1)?,
        calibration,
        &budget,
        run_seed(master, 0),
    )?;
    let state: StateSource = file.pick_or(a.state_a, "state-a", StateSource::Haar)?;
    let (rho, _) = StateSource::build_pair(&state, &StateSource::Same, n, master)?;
    let timeout = timeout(a.timeout, &file)?;
    let start = Instant::now();
    let report = run_alice(&rho, &config, protocol, &endpoint, timeout)
        .with_context(|| format!("Alice's session with {endpoint}"))?;
    let mut row = net_record("alice", protocol, &report.hello, &report.ledger);
    row.seed = master;
    row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    eprintln!(
        "alice: sent {} frames, {} classical bytes, {} qubits",
        report.ledger.frames_alice_to_bob, report.ledger.classical_bytes, report.ledger.quantum_qubits_sent
    );
    sink(&a.common, &file)?.write(&[row])
}

fn bob(a: BobArgs) -> Result<()> {
    let file = load(&a.common, &["endpoint", "state-a", "state-b", "timeout"])?;
    let endpoint: String = required(file.pick(a.endpoint, "endpoint")?, "endpoint")?;
    let state_b: StateSource = file.pick_or(a.state_b, "state-b", StateSource::Haar)?;
    let state_a: Option<StateSource> = file.pick(a.state_a, "state-a")?;
    if state_b == StateSource::Same && state_a.is_none() {
        return Err(UsageError::new("--state-b same needs --state-a").into());
    }
    let master = seed(&a.common, &file)?;
    let timeout = timeout(a.timeout, &file)?;
    let listener = BobListener::bind(&endpoint).with_context(|| format!("binding {endpoint}"))?;
    eprintln!("listening on {}", listener.local_addr()?);
    let start = Instant::now();
    let mut build_error = None;
    let mut states: Option<(Option<DensityMatrix>, DensityMatrix)> = None;
    let result = listener.accept_and_run(
        |hello| {
            let n = hello.n as usize;
            let built = match &state_a {
                Some(sa) => StateSource::build_pair(sa, &state_b, n, master).map(|(r, s)| (Some(r), s)),
                None => state_b.build(n, &mut state_rng(master, Role::Bob)).map(|s| (None, s)),
            };
            match built {
                Ok(pair) => {
                    let sigma = pair.1.clone();
                    states = Some(pair);
                    Ok(sigma)
                }
                Err(e) => {
                    let msg = format!("{e:#}");
                    build_error = Some(e);
                    Err(dipesim_core::Error::InvalidParameter(msg))
                }
            }
        },
        timeout,
    );
    let report = match (result, build_error) {
        (Err(_), Some(e)) => return Err(e.context("building Bob's state")),
        (r, _) => r.context("Bob's session")?,
    };
    let mut row = net_record("bob", report.hello.protocol, &report.hello, &report.ledger);
    row.seed = master;
    row.estimate = Some(report.run.estimate.value);
    row.stderr = report.run.estimate.stderr;
    if let Some((Some(rho), sigma)) = &states {
        row.exact = Some(inner_product(rho, sigma)?);
    }
    row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    eprintln!(
        "bob: estimate {} (stderr {:?}), {} frames received, {} sent",
        report.run.estimate.value,
        report.run.estimate.stderr,
        report.ledger.frames_alice_to_bob,
        report.ledger.frames_bob_to_alice
    );
    sink(&a.common, &file)?.write(&[row])
}
