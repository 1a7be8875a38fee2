//! Training the estimator through the simulator, and the weighted sample
//! ensemble it leaves behind.
//!
//! Every gradient step yields one network estimate. The sequence of
//! estimates, weighted by `exp(−misfit)`, stands in for a posterior over
//! networks: edge marginals, p-values and the best estimate are read off
//! it.

mod ensemble;
mod loss;
mod nu;
mod train;

pub use ensemble::{
    edge_p_value, marginal_density, EnsembleHeader, Marginal, Sample, SampleEnsemble, BANDWIDTH_FLOOR,
};
pub use loss::{hw_loss, kuramoto_loss, row_normalize, LossTerms};
pub use nu::{NuConfig, NuSchedule};
pub use train::{
    build_mlp, first_input, resimulation_error, train, train_from, Batch, LossKind, Problem, TrainingConfig,
    TrainingOutcome,
};
