use crate::wire::WireMessage;

/// Traffic counters for one endpoint. Every field only ever increases.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChannelLedger {
    /// Bytes of every frame except `QSTATE` matrix entries, headers included.
    pub classical_bytes: u64,
    /// Bytes of `QSTATE` matrix entries (16 per complex entry).
    pub quantum_payload_bytes: u64,
    /// `k` per `QSTATE` frame.
    pub quantum_qubits_sent: u64,
    pub qstate_frames: u64,
    pub frames_alice_to_bob: u64,
    /// Frames seen travelling from Bob to Alice. The channel is one-way, so
    /// a correct session leaves this at 0.
    pub frames_bob_to_alice: u64,
}

impl ChannelLedger {
    fn account(&mut self, msg: &WireMessage, frame_len: usize) {
        if let WireMessage::QState { k, entries } = msg {
            let quantum = 16 * entries.len();
            self.quantum_payload_bytes += quantum as u64;
            self.quantum_qubits_sent += *k as u64;
            self.qstate_frames += 1;
            self.classical_bytes += (frame_len - quantum) as u64;
        } else {
            self.classical_bytes += frame_len as u64;
        }
    }

    pub fn alice_to_bob(&mut self, msg: &WireMessage, frame_len: usize) {
        self.frames_alice_to_bob += 1;
        self.account(msg, frame_len);
    }

    pub fn total_bytes(&self) -> u64 {
        self.classical_bytes + self.quantum_payload_bytes
    }
}
