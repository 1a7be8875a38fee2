use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which Kuramoto equation to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    First,
    Second,
}

impl Order {
    /// States consumed to set up the initial condition (phases, or phases
    /// plus the one earlier state that fixes the velocity).
    pub fn history(self) -> usize {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

/// Parameters of `α φ̈ + β φ̇ = ω + κ Σ_j a_ij sin(φ_j − φ_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuramotoParams {
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub sigma: f64,
    /// Eigenfrequencies (or powers); empty means all zero.
    #[serde(default)]
    pub omega: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    0.01
}

impl KuramotoParams {
    pub fn first_order(beta: f64, kappa: f64, dt: f64, omega: Vec<f64>) -> Self {
        Self {
            alpha: 0.0,
            beta,
            kappa,
            dt,
            sigma: 0.0,
            omega,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// The eigenfrequency vector expanded to `n` nodes.
    pub fn omega_for(&self, n: usize) -> Result<Vec<f64>> {
        match self.omega.len() {
            0 => Ok(vec![0.0; n]),
            len if len == n => Ok(self.omega.clone()),
            len => invalid(format!("omega has {len} entries for {n} nodes")),
        }
    }

    pub fn validate(&self, order: Order, n: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return invalid(format!("sigma must be nonnegative, got {}", self.sigma));
        }
        if !self.kappa.is_finite() {
            return invalid("kappa must be finite");
        }
        match order {
            Order::First if !(self.beta > 0.0 && self.beta.is_finite()) => {
                return invalid(format!("first-order dynamics need beta > 0, got {}", self.beta));
            }
            Order::Second if !(self.alpha > 0.0 && self.alpha.is_finite()) => {
                return invalid(format!(
                    "second-order dynamics need alpha > 0, got {}; use the first-order model instead",
                    self.alpha
                ));
            }
            Order::Second if !(self.beta >= 0.0 && self.beta.is_finite()) => {
                return invalid(format!("friction beta must be nonnegative, got {}", self.beta));
            }
            _ => {}
        }
        if self.omega.iter().any(|w| !w.is_finite()) {
            return invalid("omega must be finite");
        }
        self.omega_for(n).map(|_| ())
    }
}

/// How multiplicative noise is discretized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseScheme {
    /// Stratonovich noise via the Itô drift correction `+σ²W/2`.
    #[default]
    Stratonovich,
    /// Plain Itô Euler–Maruyama, no drift correction.
    Ito,
}

/// Parameters of the Harris-Wilson retail model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarrisWilsonParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub scheme: NoiseScheme,
}

impl HarrisWilsonParams {
    /// London retail values: α=0.92, β=0.54, κ=8.3, ε=2.
    pub fn london() -> Self {
        Self {
            alpha: 0.92,
            beta: 0.54,
            kappa: 8.3,
            epsilon: 2.0,
            sigma: 0.0,
            dt: 0.01,
            scheme: NoiseScheme::Stratonovich,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("epsilon", self.epsilon),
            ("dt", self.dt),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return invalid(format!("sigma must be nonnegative, got {}", self.sigma));
        }
        Ok(())
    }

    /// Drift correction added to `εW(D − κW)` per unit `W`.
    pub fn drift_correction(&self) -> f64 {
        match self.scheme {
            NoiseScheme::Stratonovich => 0.5 * self.sigma * self.sigma,
            NoiseScheme::Ito => 0.0,
        }
    }
}
