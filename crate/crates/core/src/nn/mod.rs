//! Estimator network: configuration, the multilayer perceptron, optimizers
//! and the initialization that puts the prior on the complete graph.

mod config;
mod mlp;
mod optim;

pub use config::{Activation, BiasInit, LayerSpec, MlpConfig, OptimizerKind};
pub use mlp::{flatten_window, init_delta_on_complete_graph, Layer, Mlp, RecordedForward};
pub use optim::Optimizer;
