//! Certificates for the curvature estimates of stable self-shrinkers: each
//! operation evaluates both sides of an inequality with explicit constants
//! and returns an [`EstimateReport`](crate::report::EstimateReport).

pub mod constants;
mod cutoff;
mod local;
mod shrinker;

pub use crate::gaussian::volume_growth_certificate;
pub use crate::report::{batch_csv, Constant, EstimateReport};
pub use constants::theta;
pub use cutoff::{random_annulus_cutoffs, BoundCutoff, Cutoff, CutoffKind};
pub use local::{choi_schoen, log_cutoff_energy, scale_invariant_energy, ssy_inequality, ssy_weighted, SsyWeight};
pub use shrinker::{
    bootstrap_pointwise_bound, integral_curvature_decay, mean_value_monotonicity, simons_inequality_check,
    MeanValueTrace,
};
