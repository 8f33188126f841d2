//! Stream-id layout for protocol randomness.
//!
//! Within a run keyed by `master_seed`, stream 0 drives the swap tests of the
//! prefix-overlap phase (Bob's side). Batch `i` owns three consecutive
//! streams: the shared unitary stream `1 + 3i`, Alice's measurement stream
//! `2 + 3i` and Bob's measurement stream `3 + 3i`. Both parties regenerate
//! the shared unitary from its stream id, which is the only randomness they
//! share.

use crate::rng::StreamRng;

pub const FK_STREAM: u64 = 0;

pub fn unitary_stream(batch: u64) -> u64 {
    1 + 3 * batch
}

pub fn alice_stream(batch: u64) -> u64 {
    2 + 3 * batch
}

pub fn bob_stream(batch: u64) -> u64 {
    3 + 3 * batch
}

pub fn unitary_rng(seed: u64, batch: u64) -> StreamRng {
    StreamRng::new(seed, unitary_stream(batch))
}

pub fn alice_rng(seed: u64, batch: u64) -> StreamRng {
    StreamRng::new(seed, alice_stream(batch))
}

pub fn bob_rng(seed: u64, batch: u64) -> StreamRng {
    StreamRng::new(seed, bob_stream(batch))
}

pub fn fk_rng(seed: u64) -> StreamRng {
    StreamRng::new(seed, FK_STREAM)
}
