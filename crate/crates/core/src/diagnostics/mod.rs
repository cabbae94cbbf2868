//! Statistical verification harness for the sampler and the kernels.
//!
//! Every estimator returns an [`MCEstimate`]; acceptance decisions compare
//! means against targets at a fixed number of standard errors.

mod campbell;
mod counting;
mod dlr;
mod estimate;
pub mod gof;
mod identity;
mod truncation;

pub use campbell::{campbell_estimate, campbell_sum, CampbellEstimate, DEFAULT_TUPLE_CAP};
pub use counting::{
    bump, discrepancy_stats, fluctuation_stat, overcrowding_probability, plateau, rigidity_probe,
    DiscrepancyStats, RigidityCurve, RigidityPoint, TestFunction,
};
pub use dlr::{dlr_residual, dlr_residuals, paired_difference, DlrOptions, Statistic};
pub use estimate::{MCEstimate, Welford};
pub use identity::{algebraic_identity_residual, random_identity_instance};
pub use truncation::{truncation_profile, TruncationProfile};

/// Acceptance threshold in standard errors for all statistical checks.
pub const SE_THRESHOLD: f64 = 3.0;
