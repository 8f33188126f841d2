//! Simulation workbench for purity and inner-product estimation with
//! bounded quantum communication.
//!
//! The crate is organized bottom-up:
//!
//! * [`tensor`]: dense complex matrices on qubit registers, partial traces,
//!   permutation and symmetric-subspace operators, rotated-basis sampling.
//! * [`ensembles`]: seeded samplers for Haar unitaries/states and the mixed
//!   state families.
//! * [`oracles`]: exact values every estimator is compared against.
//! * [`protocols`]: the collision protocol, the partial swap protocol and
//!   friends, behind a name-keyed registry.
//! * [`identities`]: numerical checks of closed-form identities, also
//!   registered by name.

pub mod cap;
pub mod combinatorics;
pub mod ensembles;
mod error;
pub mod identities;
pub mod oracles;
pub mod protocols;
pub mod rng;
pub mod stats;
pub mod tensor;

pub use error::{Error, Result};
pub use rng::StreamRng;
pub use tensor::{DensityMatrix, Matrix, UnitaryMatrix};
