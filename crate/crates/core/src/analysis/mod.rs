//! Least-squares baseline, identifiability, error metrics, network
//! statistics and distribution-level uncertainty.

mod ols;
mod stats;
mod uncertainty;

pub use ols::{gram_convexity, ols_infer, GramSummary, OlsResult};
pub use stats::{
    default_bandwidth, default_grid, degrees, distribution, in_degrees, l1_error, spearman, statistic, triangles,
    DistributionEstimate, Statistic,
};
pub use uncertainty::{
    hellinger_distance, hellinger_uncertainty, integrated_band, kl_divergence, kl_uncertainty, KlProfile, KL_FLOOR,
};
