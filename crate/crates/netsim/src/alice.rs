use std::io::{BufWriter, Read, Write};
use std::net::{Shutdown, TcpStream, ToSocketAddrs};
use std::thread;
use std::time::{Duration, Instant};

use dipesim_core::protocols::collision::alice_batch;
use dipesim_core::protocols::partial_swap::{shared_suffix_unitary, AliceBatch};
use dipesim_core::protocols::streams::unitary_stream;
use dipesim_core::protocols::swap::prefix_state;
use dipesim_core::protocols::ProtocolConfig;
use dipesim_core::{DensityMatrix, Error as CoreError};

use crate::error::{NetError, Result};
use crate::ledger::ChannelLedger;
use crate::wire::{write_frame, Hello, WireMessage, WireProtocol};

/// What Alice knows once her side of a session is done.
#[derive(Clone, Debug)]
pub struct AliceReport {
    pub hello: Hello,
    pub ledger: ChannelLedger,
}

struct Sender<'a, W: Write> {
    out: &'a mut W,
    ledger: ChannelLedger,
}

impl<W: Write> Sender<'_, W> {
    fn send(&mut self, msg: &WireMessage) -> Result<()> {
        let len = write_frame(self.out, msg)?;
        self.ledger.alice_to_bob(msg, len);
        Ok(())
    }

    fn send_state(&mut self, k: usize, state: &DensityMatrix) -> Result<()> {
        self.send(&WireMessage::QState { k: k as u32, entries: state.matrix().data().to_vec() })
    }
}

/// The `HELLO` announcing `config` under `protocol`.
pub fn hello_for(config: &ProtocolConfig, protocol: WireProtocol) -> Hello {
    Hello {
        protocol,
        n: config.n as u32,
        k: config.k as u32,
        n_batches: config.n_batches as u64,
        copies_per_batch: config.copies_per_batch as u64,
        fk_copies: config.fk_copies as u64,
        seed: config.master_seed,
    }
}

/// Writes Alice's whole side of a session to `out`, in canonical order:
/// `HELLO`, the prefix-overlap states, then per batch `BATCH_META` followed
/// by each copy's outcomes and (for `k > 0`) its prefix, and finally `BYE`.
pub fn alice_session<W: Write>(
    rho: &DensityMatrix,
    config: &ProtocolConfig,
    protocol: WireProtocol,
    out: &mut W,
) -> Result<AliceReport> {
    config.validate()?;
    if rho.num_qubits() != Some(config.n) {
        return Err(CoreError::DimensionMismatch { expected: config.local_dim(), actual: rho.dim() }.into());
    }
    let hello = hello_for(config, protocol);
    let mut tx = Sender { out, ledger: ChannelLedger::default() };
    tx.send(&WireMessage::Hello(hello))?;
    let seed = config.master_seed;
    match protocol {
        WireProtocol::Collision => {
            for batch in 0..config.n_batches as u64 {
                tx.send(&WireMessage::BatchMeta { batch: batch as u32, unitary_stream: unitary_stream(batch) })?;
                let x = alice_batch(rho, config.copies_per_batch, seed, batch)?;
                tx.send(&WireMessage::ClassicalOutcomes(x))?;
            }
        }
        WireProtocol::PartialSwap => {
            let k = config.k;
            if k > 0 {
                let prefix = prefix_state(rho, k)?;
                for _ in 0..config.fk_copies {
                    tx.send_state(k, &prefix)?;
                }
            }
            for batch in 0..config.n_batches as u64 {
                tx.send(&WireMessage::BatchMeta { batch: batch as u32, unitary_stream: unitary_stream(batch) })?;
                let u = shared_suffix_unitary(config.n, k, seed, batch);
                let mut alice = AliceBatch::new(rho, &u, k, seed, batch)?;
                for _ in 0..config.copies_per_batch {
                    let (x, post) = alice.next_copy()?;
                    tx.send(&WireMessage::ClassicalOutcomes(vec![x]))?;
                    if k > 0 {
                        tx.send_state(k, &post)?;
                    }
                }
            }
        }
    }
    tx.send(&WireMessage::Bye)?;
    tx.out.flush()?;
    Ok(AliceReport { hello, ledger: tx.ledger })
}

fn connect(endpoint: &str, timeout: Duration) -> Result<TcpStream> {
    let deadline = Instant::now() + timeout;
    loop {
        let mut last = None;
        for addr in endpoint.to_socket_addrs()? {
            let left = deadline.saturating_duration_since(Instant::now()).max(Duration::from_millis(1));
            match TcpStream::connect_timeout(&addr, left) {
                Ok(s) => return Ok(s),
                Err(e) => last = Some(e),
            }
        }
        if Instant::now() >= deadline {
            return Err(last.map(NetError::from).unwrap_or(NetError::Timeout));
        }
        thread::sleep(Duration::from_millis(50));
    }
}

/// Connects to Bob at `endpoint` (retrying until `timeout` while he starts
/// up), runs Alice's side, then waits for Bob to close the connection. Any
/// byte Bob sends back is a protocol violation.
pub fn run_alice(
    rho: &DensityMatrix,
    config: &ProtocolConfig,
    protocol: WireProtocol,
    endpoint: &str,
    timeout: Duration,
) -> Result<AliceReport> {
    let stream = connect(endpoint, timeout)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    let report = {
        let mut out = BufWriter::with_capacity(1 << 16, &stream);
        alice_session(rho, config, protocol, &mut out)?
    };
    stream.shutdown(Shutdown::Write)?;
    let mut back = Vec::new();
    (&stream).read_to_end(&mut back)?;
    if !back.is_empty() {
        return Err(NetError::OneWayViolation(back.len() as u64));
    }
    Ok(report)
}
