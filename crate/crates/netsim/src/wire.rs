//! Length-prefixed binary frames: `u32` payload length (little-endian),
//! `u8` message type, payload. All integers and floats are little-endian.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{NetError, Result};

/// Upper bound on a payload, far above the largest legal `QSTATE`.
pub const MAX_PAYLOAD: usize = 64 << 20;
pub const HEADER_LEN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum MessageType {
    Hello = 1,
    BatchMeta = 2,
    ClassicalOutcomes = 3,
    QState = 4,
    FkSample = 5,
    Result = 6,
    Bye = 7,
}

impl MessageType {
    pub fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            1 => Self::Hello,
            2 => Self::BatchMeta,
            3 => Self::ClassicalOutcomes,
            4 => Self::QState,
            5 => Self::FkSample,
            6 => Self::Result,
            7 => Self::Bye,
            _ => return Err(NetError::Frame(format!("unknown message type {b}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Hello => "HELLO",
            Self::BatchMeta => "BATCH_META",
            Self::ClassicalOutcomes => "CLASSICAL_OUTCOMES",
            Self::QState => "QSTATE",
            Self::FkSample => "FK_SAMPLE",
            Self::Result => "RESULT",
            Self::Bye => "BYE",
        }
    }
}

/// Protocol identifiers carried in `HELLO`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum WireProtocol {
    Collision = 1,
    PartialSwap = 2,
}

impl WireProtocol {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Self::Collision),
            2 => Ok(Self::PartialSwap),
            _ => Err(NetError::Frame(format!("unknown protocol id {b}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Collision => "alg1",
            Self::PartialSwap => "alg2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "alg1" => Some(Self::Collision),
            "alg2" => Some(Self::PartialSwap),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hello {
    pub protocol: WireProtocol,
    pub n: u32,
    pub k: u32,
    pub n_batches: u64,
    pub copies_per_batch: u64,
    pub fk_copies: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WireMessage {
    Hello(Hello),
    BatchMeta {
        batch: u32,
        unitary_stream: u64,
    },
    ClassicalOutcomes(Vec<u32>),
    /// Row-major `2^k × 2^k` density matrix.
    QState {
        k: u32,
        entries: Vec<Complex64>,
    },
    FkSample(i8),
    Result {
        w: f64,
        stderr: f64,
    },
    Bye,
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(NetError::Frame("payload shorter than its fields".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(NetError::Frame(format!("{} trailing payload bytes", self.buf.len())))
        }
    }
}

impl WireMessage {
    pub fn message_type(&self) -> MessageType {
        match self {
            Self::Hello(_) => MessageType::Hello,
            Self::BatchMeta { .. } => MessageType::BatchMeta,
            Self::ClassicalOutcomes(_) => MessageType::ClassicalOutcomes,
            Self::QState { .. } => MessageType::QState,
            Self::FkSample(_) => MessageType::FkSample,
            Self::Result { .. } => MessageType::Result,
            Self::Bye => MessageType::Bye,
        }
    }

    pub fn payload(&self) -> Vec<u8> {
        let mut p = Vec::new();
        match self {
            Self::Hello(h) => {
                p.push(h.protocol as u8);
                p.extend(h.n.to_le_bytes());
                p.extend(h.k.to_le_bytes());
                p.extend(h.n_batches.to_le_bytes());
                p.extend(h.copies_per_batch.to_le_bytes());
                p.extend(h.fk_copies.to_le_bytes());
                p.extend(h.seed.to_le_bytes());
            }
            Self::BatchMeta { batch, unitary_stream } => {
                p.extend(batch.to_le_bytes());
                p.extend(unitary_stream.to_le_bytes());
            }
            Self::ClassicalOutcomes(xs) => {
                p.extend((xs.len() as u32).to_le_bytes());
                for x in xs {
                    p.extend(x.to_le_bytes());
                }
            }
            Self::QState { k, entries } => {
                p.reserve(4 + 16 * entries.len());
                p.extend(k.to_le_bytes());
                for z in entries {
                    p.extend(z.re.to_le_bytes());
                    p.extend(z.im.to_le_bytes());
                }
            }
            Self::FkSample(z) => p.push(*z as u8),
            Self::Result { w, stderr } => {
                p.extend(w.to_le_bytes());
                p.extend(stderr.to_le_bytes());
            }
            Self::Bye => {}
        }
        p
    }

    /// Complete frame bytes.
    pub fn encode(&self) -> Vec<u8> {
        let payload = self.payload();
        let mut frame = Vec::with_capacity(HEADER_LEN + payload.len());
        frame.extend((payload.len() as u32).to_le_bytes());
        frame.push(self.message_type() as u8);
        frame.extend(payload);
        frame
    }

    pub fn decode(kind: MessageType, payload: &[u8]) -> Result<Self> {
        let mut c = Cursor { buf: payload };
        let msg = match kind {
            MessageType::Hello => Self::Hello(Hello {
                protocol: WireProtocol::from_byte(c.u8()?)?,
                n: c.u32()?,
                k: c.u32()?,
                n_batches: c.u64()?,
                copies_per_batch: c.u64()?,
                fk_copies: c.u64()?,
                seed: c.u64()?,
            }),
            MessageType::BatchMeta => Self::BatchMeta { batch: c.u32()?, unitary_stream: c.u64()? },
            MessageType::ClassicalOutcomes => {
                let count = c.u32()? as usize;
                if c.buf.len() != 4 * count {
                    return Err(NetError::Frame(format!(
                        "CLASSICAL_OUTCOMES declares {count} values in {} bytes",
                        c.buf.len()
                    )));
                }
                Self::ClassicalOutcomes((0..count).map(|_| c.u32()).collect::<Result<_>>()?)
            }
            MessageType::QState => {
                let k = c.u32()?;
                if k > 12 {
                    return Err(NetError::Frame(format!("QSTATE with k = {k} exceeds the dimension cap")));
                }
                let count = 1usize << (2 * k);
                if c.buf.len() != 16 * count {
                    return Err(NetError::Frame(format!(
                        "QSTATE for k = {k} needs {} entry bytes, got {}",
                        16 * count,
                        c.buf.len()
                    )));
                }
                let entries = (0..count).map(|_| Ok(Complex64::new(c.f64()?, c.f64()?))).collect::<Result<_>>()?;
                Self::QState { k, entries }
            }
            MessageType::FkSample => {
                let z = c.u8()? as i8;
                if z != 1 && z != -1 {
                    return Err(NetError::Frame(format!("FK_SAMPLE outcome {z} is not ±1")));
                }
                Self::FkSample(z)
            }
            MessageType::Result => Self::Result { w: c.f64()?, stderr: c.f64()? },
            MessageType::Bye => Self::Bye,
        };
        c.finish()?;
        Ok(msg)
    }
}

/// Writes one frame; returns its size in bytes.
pub fn write_frame<W: Write>(w: &mut W, msg: &WireMessage) -> Result<usize> {
    let frame = msg.encode();
    w.write_all(&frame)?;
    Ok(frame.len())
}

/// Reads one frame; returns the message and its size in bytes.
pub fn read_frame<R: Read>(r: &mut R) -> Result<(WireMessage, usize)> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    let len = u32::from_le_bytes(header[..4].try_into().unwrap()) as usize;
    if len > MAX_PAYLOAD {
        return Err(NetError::Frame(format!("declared payload of {len} bytes exceeds the limit")));
    }
    let kind = MessageType::from_byte(header[4])?;
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload)?;
    Ok((WireMessage::decode(kind, &payload)?, HEADER_LEN + len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(msg: WireMessage) {
        let bytes = msg.encode();
        let (back, len) = read_frame(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, msg);
        assert_eq!(len, bytes.len());
    }

    #[test]
    fn every_message_round_trips() {
        round_trip(WireMessage::Hello(Hello {
            protocol: WireProtocol::PartialSwap,
            n: 3,
            k: 1,
            n_batches: 10,
            copies_per_batch: 2,
            fk_copies: 7,
            seed: u64::MAX,
        }));
        round_trip(WireMessage::BatchMeta { batch: 4, unitary_stream: 13 });
        round_trip(WireMessage::ClassicalOutcomes(vec![0, 5, u32::MAX]));
        round_trip(WireMessage::QState {
            k: 1,
            entries: vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.5, 0.0),
            ],
        });
        round_trip(WireMessage::FkSample(-1));
        round_trip(WireMessage::Result { w: 0.25, stderr: 1e-3 });
        round_trip(WireMessage::Bye);
    }

    #[test]
    fn layout_is_little_endian() {
        let bytes = WireMessage::BatchMeta { batch: 1, unitary_stream: 2 }.encode();
        assert_eq!(bytes, [12, 0, 0, 0, 2, 1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(WireMessage::Bye.encode(), [0, 0, 0, 0, 7]);
    }

    #[test]
    fn corrupt_frames_are_rejected() {
        let mut bad_type = WireMessage::Bye.encode();
        bad_type[4] = 99;
        assert!(matches!(read_frame(&mut bad_type.as_slice()), Err(NetError::Frame(_))));

        let mut short = WireMessage::BatchMeta { batch: 1, unitary_stream: 2 }.encode();
        short[0] = 11;
        short.pop();
        assert!(matches!(read_frame(&mut short.as_slice()), Err(NetError::Frame(_))));

        let mut long = WireMessage::Bye.encode();
        long[0] = 1;
        long.push(0);
        assert!(matches!(read_frame(&mut long.as_slice()), Err(NetError::Frame(_))));

        let q = WireMessage::QState { k: 1, entries: vec![Complex64::new(1.0, 0.0); 3] }.encode();
        assert!(matches!(read_frame(&mut q.as_slice()), Err(NetError::Frame(_))));

        let truncated = &WireMessage::ClassicalOutcomes(vec![1, 2]).encode()[..8];
        assert!(matches!(read_frame(&mut &truncated[..]), Err(NetError::ConnectionClosed)));

        let huge = [0xff, 0xff, 0xff, 0xff, 1];
        assert!(matches!(read_frame(&mut &huge[..]), Err(NetError::Frame(_))));
    }
}
