//! Numeric checks of the closed-form identities and inequalities behind the
//! protocol analysis. Each check yields a `CheckReport` with a residual and
//! the threshold it must stay under.

pub mod channels;
pub mod combinatorial;
pub mod likelihood;
pub mod moments;
pub mod povm;
pub mod registry;
pub mod report;
pub mod sym;

pub use channels::{check_chiribella, check_mp_bound, BoundForm};
pub use combinatorial::{check_perm_inequality, check_stirling_identity};
pub use likelihood::{check_likelihood_normalization, check_likelihood_ratio, likelihood_ratio_closed_form, LeafShape};
pub use moments::{check_collision_moments, check_haar_moment, check_induced_moments};
pub use povm::{check_povm_swap_bound, PovmInstance};
pub use registry::{Check, CheckKind, CheckRegistry};
pub use report::{CheckParams, CheckReport};
