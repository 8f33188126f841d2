//! Dense complex linear algebra over multi-qubit registers.

pub mod linalg;
mod matrix;
pub mod measure;
pub mod ops;
pub mod perm;
mod state;

pub use matrix::Matrix;
pub use measure::{
    born_probabilities, measure_rotated_basis, measure_suffix_keep_prefix, sample_index, SuffixMeasurement,
};
pub use ops::{kron, partial_trace, partial_trace_dims, permute_subsystems, swap_operator};
pub use perm::{permutation_operator, sym_dimension, sym_projector, PermutationOp};
pub use state::{DensityMatrix, UnitaryMatrix};

pub use num_complex::Complex64;
