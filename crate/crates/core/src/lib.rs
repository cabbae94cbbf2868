//! Finite one-dimensional log-gases and their conditional Gibbs kernels.
//!
//! The crate covers point configurations on the line ([`config`]), the
//! logarithmic energies and move functions ([`energy`]), Metropolis samplers
//! for the periodic log-gas and for fixed-count Gibbs kernels ([`sampler`]),
//! partition functions ([`partition`]) and a statistical verification
//! harness ([`diagnostics`]).

pub mod config;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod partition;
pub mod quad;
pub mod sampler;
pub mod sum;

pub use config::{discrepancy, w1_distance, Discrepancy, PointConfiguration, Window};
pub use energy::{interaction_energy, pair_potential, InteractionModel};
pub use error::{Error, Result};
pub use diagnostics::MCEstimate;
pub use partition::{PartitionMethod, PartitionValue};
pub use sampler::{GasParams, KernelSpec, Schedule};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
