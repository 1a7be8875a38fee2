//! Minimal reverse-mode automatic differentiation over dense `f64` tensors.
//!
//! A [`Tape`] records every operation of a forward pass. Calling
//! [`Tape::backward`] replays the record in reverse and returns the
//! vector-Jacobian product for every tracked leaf. The tape is cleared
//! between training iterations; handles from an earlier generation are
//! rejected.

mod tape;
mod tensor;

pub use tape::{hard_sigmoid, hard_sigmoid_slope, sigmoid, Gradients, OpKind, Tape, Var};
pub use tensor::Tensor;
