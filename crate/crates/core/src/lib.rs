//! Inference of weighted network adjacency matrices from time series of
//! coupled dynamical systems.
//!
//! A small neural network maps observation windows to an adjacency matrix;
//! the matrix drives a differentiable simulator whose prediction error trains
//! the network. Every intermediate estimate is kept, so training yields a
//! weighted ensemble of networks rather than a single point estimate.
//!
//! Modules:
//! - [`autodiff`]: tape-based reverse-mode differentiation.
//! - [`nn`]: multilayer perceptron, optimizers and prior-enforcing init.
//! - [`dynamics`]: Kuramoto and Harris-Wilson steppers and data generators.
//! - [`graphs`]: ground-truth network construction.
//! - [`inference`]: the training loop, losses and ensemble statistics.
//! - [`analysis`]: OLS baseline, convexity, error metrics and uncertainty.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod autodiff;
pub mod density;
pub mod dynamics;
mod error;
pub mod graphs;
pub mod inference;
pub mod nn;
pub mod rng;

pub use error::{Error, Result};
