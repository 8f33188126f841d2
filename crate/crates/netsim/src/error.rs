use std::io;

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("i/o error: {0}")]
    Io(io::Error),
    #[error("timed out waiting for the peer")]
    Timeout,
    #[error("connection closed by the peer")]
    ConnectionClosed,
    #[error("corrupt frame: {0}")]
    Frame(String),
    #[error("unexpected message: expected {expected}, got {got}")]
    Unexpected { expected: &'static str, got: &'static str },
    #[error("session mismatch: {0}")]
    Mismatch(String),
    #[error("received state rejected: {0}")]
    InvalidState(dipesim_core::Error),
    #[error("one-way channel violated: {0} bytes arrived from Bob")]
    OneWayViolation(u64),
    #[error(transparent)]
    Core(#[from] dipesim_core::Error),
}

impl From<io::Error> for NetError {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => NetError::Timeout,
            io::ErrorKind::UnexpectedEof
            | io::ErrorKind::ConnectionReset
            | io::ErrorKind::ConnectionAborted
            | io::ErrorKind::BrokenPipe => NetError::ConnectionClosed,
            _ => NetError::Io(e),
        }
    }
}

impl NetError {
    /// Whether the failure is a numeric invariant violation rather than a
    /// transport or usage problem.
    pub fn is_numeric(&self) -> bool {
        match self {
            NetError::InvalidState(e) | NetError::Core(e) => e.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T, E = NetError> = std::result::Result<T, E>;
