use std::io::{BufReader, Read};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread;
use std::time::{Duration, Instant};

use dipesim_core::protocols::collision::bob_batch;
use dipesim_core::protocols::partial_swap::{partial_swap_estimator, shared_suffix_unitary, BobBatch};
use dipesim_core::protocols::streams::unitary_stream;
use dipesim_core::protocols::swap::PrefixOverlapReceiver;
use dipesim_core::protocols::{
    assemble_alg1_run, assemble_alg2_run, resolve_fk, BatchRecord, Branch, ProtocolConfig, Run,
};
use dipesim_core::{DensityMatrix, Error as CoreError, Matrix};

use crate::error::{NetError, Result};
use crate::ledger::ChannelLedger;
use crate::wire::{read_frame, Hello, WireMessage, WireProtocol};

/// Bob's result: the estimate and transcript, plus channel accounting.
#[derive(Clone, Debug)]
pub struct BobReport {
    pub hello: Hello,
    pub config: ProtocolConfig,
    pub run: Run,
    pub ledger: ChannelLedger,
    /// `FK_SAMPLE` and `RESULT` records Bob produced. They are kept locally
    /// because the channel only runs from Alice to Bob.
    pub log: Vec<WireMessage>,
}

struct Receiver<'a, R: Read> {
    input: &'a mut R,
    ledger: ChannelLedger,
}

impl<R: Read> Receiver<'_, R> {
    fn next(&mut self) -> Result<WireMessage> {
        let (msg, len) = read_frame(self.input)?;
        self.ledger.alice_to_bob(&msg, len);
        Ok(msg)
    }

    fn batch_meta(&mut self, expected: u64) -> Result<()> {
        match self.next()? {
            WireMessage::BatchMeta { batch, unitary_stream: stream } => {
                if batch as u64 != expected || stream != unitary_stream(expected) {
                    return Err(NetError::Mismatch(format!(
                        "expected batch {expected} on unitary stream {}, got batch {batch} on stream {stream}",
                        unitary_stream(expected)
                    )));
                }
                Ok(())
            }
            other => Err(unexpected("BATCH_META", &other)),
        }
    }

    fn outcomes(&mut self, count: usize, bound: usize) -> Result<Vec<u32>> {
        match self.next()? {
            WireMessage::ClassicalOutcomes(x) => {
                if x.len() != count {
                    return Err(NetError::Mismatch(format!("expected {count} outcomes, got {}", x.len())));
                }
                if let Some(bad) = x.iter().find(|&&v| v as usize >= bound) {
                    return Err(NetError::Mismatch(format!("outcome {bad} out of range 0..{bound}")));
                }
                Ok(x)
            }
            other => Err(unexpected("CLASSICAL_OUTCOMES", &other)),
        }
    }

    /// The next transmitted prefix; for `k = 0` nothing travels and the
    /// prefix is the trivial one-dimensional state.
    fn prefix(&mut self, k: usize) -> Result<DensityMatrix> {
        if k == 0 {
            return Ok(DensityMatrix::basis(1, 0));
        }
        match self.next()? {
            WireMessage::QState { k: sent, entries } => {
                if sent as usize != k {
                    return Err(NetError::Mismatch(format!("expected a {k}-qubit state, got {sent} qubits")));
                }
                Matrix::from_vec(1 << k, entries).and_then(DensityMatrix::new).map_err(NetError::InvalidState)
            }
            other => Err(unexpected("QSTATE", &other)),
        }
    }
}

fn unexpected(expected: &'static str, got: &WireMessage) -> NetError {
    NetError::Unexpected { expected, got: got.message_type().name() }
}

fn config_from(hello: &Hello) -> Result<ProtocolConfig> {
    let size = |v: u64, what: &str| {
        usize::try_from(v).map_err(|_| NetError::Mismatch(format!("{what} = {v} does not fit in memory")))
    };
    let mut config = ProtocolConfig::new(
        hello.n as usize,
        hello.k as usize,
        size(hello.n_batches, "N_b")?,
        size(hello.copies_per_batch, "m")?,
        size(hello.fk_copies, "N_k")?,
        hello.seed,
    );
    config.branch = Some(match hello.protocol {
        WireProtocol::Collision => Branch::Collision,
        WireProtocol::PartialSwap => Branch::PartialSwap,
    });
    config.validate()?;
    Ok(config)
}

/// Reads a complete session from `input`. `sigma_for` builds Bob's state
/// once the `HELLO` has fixed the register size.
pub fn bob_session<R: Read>(
    input: &mut R,
    sigma_for: impl FnOnce(&Hello) -> dipesim_core::Result<DensityMatrix>,
) -> Result<BobReport> {
    let mut rx = Receiver { input, ledger: ChannelLedger::default() };
    let hello = match rx.next()? {
        WireMessage::Hello(h) => h,
        other => return Err(unexpected("HELLO", &other)),
    };
    let config = config_from(&hello)?;
    let sigma = sigma_for(&hello)?;
    if sigma.num_qubits() != Some(config.n) {
        return Err(CoreError::DimensionMismatch { expected: config.local_dim(), actual: sigma.dim() }.into());
    }
    let seed = config.master_seed;
    let m = config.copies_per_batch;
    let mut log = Vec::new();
    let mut values = Vec::with_capacity(config.n_batches);
    let mut batches = Vec::with_capacity(config.n_batches);
    let run = match hello.protocol {
        WireProtocol::Collision => {
            for batch in 0..config.n_batches as u64 {
                rx.batch_meta(batch)?;
                let x = rx.outcomes(m, config.local_dim())?;
                let (w, y) = bob_batch(&sigma, m, seed, batch, &x)?;
                values.push(w);
                batches.push(BatchRecord {
                    batch: batch as u32,
                    unitary_stream: unitary_stream(batch),
                    x,
                    y,
                    z: Vec::new(),
                });
            }
            assemble_alg1_run(&config, values, batches)
        }
        WireProtocol::PartialSwap => {
            let k = config.k;
            let mut overlap = PrefixOverlapReceiver::new(&sigma, k, seed)?;
            for _ in 0..config.fk_copies {
                let prefix = rx.prefix(k)?;
                log.push(WireMessage::FkSample(overlap.receive(&prefix)?));
            }
            let (measured, fk_outcomes) = overlap.finish();
            let fk = resolve_fk(&config, measured)?;
            let suffix_dim = config.suffix_dim();
            for batch in 0..config.n_batches as u64 {
                rx.batch_meta(batch)?;
                let u = shared_suffix_unitary(config.n, k, seed, batch);
                let mut bob = BobBatch::new(&sigma, &u, k, seed, batch)?;
                for _ in 0..m {
                    let x = rx.outcomes(1, suffix_dim)?[0];
                    let prefix = rx.prefix(k)?;
                    bob.receive(x, &prefix)?;
                }
                let (g, x, y, z) = bob.finish();
                values.push(partial_swap_estimator(suffix_dim, g, fk.value));
                batches.push(BatchRecord { batch: batch as u32, unitary_stream: unitary_stream(batch), x, y, z });
            }
            assemble_alg2_run(&config, fk, fk_outcomes, values, batches)
        }
    };
    match rx.next()? {
        WireMessage::Bye => {}
        other => return Err(unexpected("BYE", &other)),
    }
    log.push(WireMessage::Result { w: run.estimate.value, stderr: run.estimate.stderr.unwrap_or(f64::NAN) });
    Ok(BobReport { hello, config, run, ledger: rx.ledger, log })
}

/// A bound socket waiting for Alice.
#[derive(Debug)]
pub struct BobListener {
    listener: TcpListener,
}

impl BobListener {
    pub fn bind(endpoint: &str) -> Result<Self> {
        Ok(Self { listener: TcpListener::bind(endpoint)? })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    fn accept(&self, timeout: Duration) -> Result<TcpStream> {
        let deadline = Instant::now() + timeout;
        self.listener.set_nonblocking(true)?;
        let accepted = loop {
            match self.listener.accept() {
                Ok((stream, _)) => break Ok(stream),
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    if Instant::now() >= deadline {
                        break Err(NetError::Timeout);
                    }
                    thread::sleep(Duration::from_millis(5));
                }
                Err(e) => break Err(e.into()),
            }
        };
        self.listener.set_nonblocking(false)?;
        let stream = accepted?;
        stream.set_nonblocking(false)?;
        stream.set_read_timeout(Some(timeout))?;
        Ok(stream)
    }

    /// Accepts one connection and reads Alice's session from it. Bob only
    /// ever reads; the connection is closed when the session ends.
    pub fn accept_and_run(
        &self,
        sigma_for: impl FnOnce(&Hello) -> dipesim_core::Result<DensityMatrix>,
        timeout: Duration,
    ) -> Result<BobReport> {
        let stream = self.accept(timeout)?;
        let mut input = BufReader::with_capacity(1 << 16, &stream);
        bob_session(&mut input, sigma_for)
    }
}

/// Binds `endpoint`, serves one session, and returns Bob's report.
pub fn run_bob(
    endpoint: &str,
    sigma_for: impl FnOnce(&Hello) -> dipesim_core::Result<DensityMatrix>,
    timeout: Duration,
) -> Result<BobReport> {
    BobListener::bind(endpoint)?.accept_and_run(sigma_for, timeout)
}
