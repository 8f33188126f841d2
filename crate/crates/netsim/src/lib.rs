//! Alice and Bob as two endpoints of a TCP connection.
//!
//! Alice streams classical outcomes and `k`-qubit prefix states to Bob over
//! length-prefixed binary frames; Bob never writes to the socket. Both sides
//! derive their randomness from the seed carried in `HELLO`, so a session
//! reproduces the in-process run bit for bit.
//!
//! A transmitted prefix is a full `2^k × 2^k` density matrix because the
//! post-measurement prefix is mixed in general; physically it stands for `k`
//! qubits, and the ledger counts it as such.

mod alice;
mod bob;
pub mod error;
pub mod ledger;
pub mod wire;

use std::time::Duration;

pub use alice::{alice_session, hello_for, run_alice, AliceReport};
pub use bob::{bob_session, run_bob, BobListener, BobReport};
pub use error::{NetError, Result};
pub use ledger::ChannelLedger;
pub use wire::{Hello, MessageType, WireMessage, WireProtocol};

/// Blocking I/O timeout used when the caller does not pick one.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
