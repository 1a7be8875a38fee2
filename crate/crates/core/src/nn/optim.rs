use crate::autodiff::Tensor;
use crate::error::{shape_err, Error, Result};

use super::config::OptimizerKind;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// First-order optimizer state (Adam with bias correction, or plain SGD).
#[derive(Clone, Debug)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    first_moment: Vec<Tensor>,
    second_moment: Vec<Tensor>,
    step: u64,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Self {
        Self {
            kind,
            learning_rate,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
            step: 0,
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Number of completed steps.
    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn moments(&self) -> (&[Tensor], &[Tensor]) {
        (&self.first_moment, &self.second_moment)
    }

    /// Applies one update in place. Non-finite gradients abort the step
    /// without touching parameters or state.
    pub fn step(&mut self, params: &mut [&mut Tensor], grads: &[Tensor]) -> Result<()> {
        if params.len() != grads.len() {
            return shape_err(
                "optimizer_step",
                format!("{} parameters but {} gradients", params.len(), grads.len()),
            );
        }
        for (p, g) in params.iter().zip(grads) {
            if p.shape() != g.shape() {
                return shape_err(
                    "optimizer_step",
                    format!("parameter {:?} vs gradient {:?}", p.shape(), g.shape()),
                );
            }
        }
        if grads.iter().any(|g| !g.all_finite()) {
            return Err(Error::NonFiniteGradient {
                iteration: self.step,
            });
        }
        if self.first_moment.is_empty() {
            self.first_moment = params.iter().map(|p| Tensor::zeros(p.shape())).collect();
            self.second_moment = self.first_moment.clone();
        }
        self.step += 1;
        let lr = self.learning_rate;
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads) {
                    for (pi, gi) in p.data_mut().iter_mut().zip(g.data()) {
                        *pi -= lr * gi;
                    }
                }
            }
            OptimizerKind::Adam => {
                let t = self.step as i32;
                let c1 = 1.0 - BETA1.powi(t);
                let c2 = 1.0 - BETA2.powi(t);
                for (((p, g), m), v) in params
                    .iter_mut()
                    .zip(grads)
                    .zip(self.first_moment.iter_mut())
                    .zip(self.second_moment.iter_mut())
                {
                    for (((pi, &gi), mi), vi) in p
                        .data_mut()
                        .iter_mut()
                        .zip(g.data())
                        .zip(m.data_mut())
                        .zip(v.data_mut())
                    {
                        *mi = BETA1 * *mi + (1.0 - BETA1) * gi;
                        *vi = BETA2 * *vi + (1.0 - BETA2) * gi * gi;
                        let m_hat = *mi / c1;
                        let v_hat = *vi / c2;
                        *pi -= lr * m_hat / (v_hat.sqrt() + EPS);
                    }
                }
            }
        }
        Ok(())
    }
}
