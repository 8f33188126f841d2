//! CSV rows written by the harness, one struct per file kind.
//!
//! Column order is the field order below. Floats use the shortest
//! representation that round-trips; missing values are empty cells.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// One protocol run, as written by `estimate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub protocol: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    #[serde(rename = "N_b")]
    pub n_b: usize,
    pub m: usize,
    #[serde(rename = "N_k")]
    pub n_k: usize,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub exact: f64,
    pub abs_error: f64,
    pub wall_ms: f64,
}

/// One grid cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// `variance`, `error` or `epsilon`.
    pub sweep: String,
    pub protocol: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    #[serde(rename = "N_b")]
    pub n_b: usize,
    pub m: usize,
    #[serde(rename = "N_k")]
    pub n_k: usize,
    /// `N_b · m`.
    pub total_copies: usize,
    pub reps: usize,
    pub seed: u64,
    pub mean_exact: f64,
    pub mean_estimate: f64,
    pub mean_abs_error: f64,
    /// Fraction of repetitions with `|estimate - exact| ≤ epsilon`.
    pub success_rate: f64,
    /// Sample variance of the per-batch values `w_i`, pooled over repetitions.
    pub var_w: f64,
    pub var_w_stderr: Option<f64>,
    pub log2_var_w: f64,
}

/// Outcome of a distinguishing experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishRecord {
    pub ensemble: String,
    pub protocol: String,
    pub n: usize,
    pub epsilon: f64,
    pub rank: usize,
    pub k: usize,
    #[serde(rename = "N_b")]
    pub n_b: usize,
    pub m: usize,
    #[serde(rename = "N_k")]
    pub n_k: usize,
    pub trials: usize,
    pub seed: u64,
    pub oracle: bool,
    pub threshold: f64,
    pub successes: usize,
    pub success_rate: f64,
}

/// One identity-check report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub kind: String,
    pub params: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub samples: u64,
    pub seed: u64,
}

/// One side of a networked session with its channel accounting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetRecord {
    pub role: String,
    pub protocol: String,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N_b")]
    pub n_b: usize,
    pub m: usize,
    #[serde(rename = "N_k")]
    pub n_k: usize,
    pub seed: u64,
    pub protocol_seed: u64,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub exact: Option<f64>,
    pub classical_bytes: u64,
    pub quantum_payload_bytes: u64,
    pub quantum_qubits_sent: u64,
    pub qstate_frames: u64,
    pub frames_alice_to_bob: u64,
    pub frames_bob_to_alice: u64,
    pub wall_ms: f64,
}

/// A CSV destination: standard output, or a file that is appended to, with
/// the header written only when the file is new or empty.
pub struct CsvSink {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvSink {
    /// `None` or `-` means standard output.
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let (out, header): (Box<dyn Write>, bool) = match path {
            Some(p) if p.as_os_str() != "-" => {
                let file: File = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .with_context(|| format!("opening {}", p.display()))?;
                let empty = file.metadata()?.len() == 0;
                (Box::new(file), empty)
            }
            _ => (Box::new(io::stdout()), true),
        };
        let writer = csv::WriterBuilder::new().has_headers(header).from_writer(out);
        Ok(Self { writer })
    }

    pub fn write<T: Serialize>(&mut self, rows: &[T]) -> Result<()> {
        for row in rows {
            self.writer.serialize(row)?;
        }
        self.writer.flush()?;
        Ok(())
    }
}
