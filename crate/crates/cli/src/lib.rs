//! The `dipesim` command-line harness.
//!
//! Subcommands run protocols (`estimate`), parameter grids (`sweep`),
//! identity checks (`check`), distinguishing experiments (`distinguish`) and
//! the two networked parties (`alice`, `bob`). Every command writes CSV.
//!
//! Exit codes: 0 on success, 1 for usage and I/O errors, 2 when a numeric
//! invariant fails (a state that is not a state, probabilities that do not
//! sum to one, ...).

pub mod cli;
pub mod experiments;
pub mod records;
pub mod settings;
pub mod source;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

/// Bad flags, values or files, as opposed to a failure inside a computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError(String);

impl UsageError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

/// Exit code for an error: 2 if any cause is a numeric invariant failure,
/// else 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let numeric = err.chain().any(|cause| {
        cause.downcast_ref::<dipesim_core::Error>().is_some_and(|e| e.is_numeric())
            || cause.downcast_ref::<dipesim_netsim::NetError>().is_some_and(|e| e.is_numeric())
    });
    if numeric {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli::execute(parsed) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_failures_map_to_two() {
        let numeric = anyhow::Error::from(dipesim_core::Error::Numeric("trace".into()));
        assert_eq!(exit_code(&numeric), EXIT_NUMERIC);
        let wrapped = numeric.context("running alg2");
        assert_eq!(exit_code(&wrapped), EXIT_NUMERIC);
        let usage = anyhow::Error::from(UsageError::new("bad flag"));
        assert_eq!(exit_code(&usage), EXIT_USAGE);
        let param = anyhow::Error::from(dipesim_core::Error::InvalidParameter("k".into()));
        assert_eq!(exit_code(&param), EXIT_USAGE);
    }
}
