//! Two-party estimators of `tr(rho sigma)` and the shared machinery they use.

pub mod collision;
pub mod config;
pub mod params;
pub mod partial_swap;
pub mod record;
pub mod registry;
pub mod streams;
pub mod swap;

pub use collision::{alg1_batch, alg1_run, assemble_alg1_run};
pub use config::{Branch, ProtocolConfig};
pub use params::{choose_params, DEFAULT_CALIBRATION};
pub use partial_swap::{alg2_batch, alg2_run, assemble_alg2_run, purity_estimate, resolve_fk};
pub use record::{BatchRecord, Estimate, Run, Transcript};
pub use registry::{Protocol, ProtocolRegistry};
pub use swap::{alg2_fk_phase, swap_test_sample};
