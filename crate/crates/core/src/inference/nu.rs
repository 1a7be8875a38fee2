use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Constants of the prior-weight schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuConfig {
    #[serde(default = "default_value")]
    pub value: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_value() -> f64 {
    10.0
}

fn default_threshold() -> f64 {
    1e-10
}

fn default_window() -> usize {
    20
}

impl Default for NuConfig {
    fn default() -> Self {
        Self {
            value: default_value(),
            threshold: default_threshold(),
            window: default_window(),
        }
    }
}

impl NuConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.value >= 0.0 && self.value.is_finite()) {
            return invalid(format!("nu value must be nonnegative, got {}", self.value));
        }
        if !(self.threshold >= 0.0) {
            return invalid(format!("nu threshold must be nonnegative, got {}", self.threshold));
        }
        if self.window == 0 {
            return invalid("nu window must be positive");
        }
        Ok(())
    }
}

/// Prior weight `ν`: held at its configured value until the moving
/// average of the loss stops changing, then set to zero for good.
///
/// With `m_s` the mean of the last `window` losses, the slope and
/// curvature are `(m_s − m_{s−2})/2` and `m_s − 2m_{s−1} + m_{s−2}`. The
/// schedule latches once both magnitudes are below the threshold, which
/// first becomes possible after `window + 2` losses.
#[derive(Clone, Debug)]
pub struct NuSchedule {
    config: NuConfig,
    history: Vec<f64>,
    released_at: Option<usize>,
}

impl NuSchedule {
    pub fn new(config: NuConfig) -> Self {
        Self {
            config,
            history: Vec::new(),
            released_at: None,
        }
    }

    /// Current weight.
    pub fn nu(&self) -> f64 {
        if self.released_at.is_some() {
            0.0
        } else {
            self.config.value
        }
    }

    /// Number of losses seen when the schedule latched.
    pub fn released_at(&self) -> Option<usize> {
        self.released_at
    }

    /// Windowed slope and curvature of the loss, once enough history exists.
    pub fn derivatives(&self) -> Option<(f64, f64)> {
        let w = self.config.window;
        let len = self.history.len();
        if len < w + 2 {
            return None;
        }
        let mean_ending = |end: usize| self.history[end + 1 - w..=end].iter().sum::<f64>() / w as f64;
        let (m0, m1, m2) = (mean_ending(len - 1), mean_ending(len - 2), mean_ending(len - 3));
        Some(((m0 - m2) / 2.0, m0 - 2.0 * m1 + m2))
    }

    /// Records a loss and returns the weight to use next.
    pub fn push(&mut self, loss: f64) -> f64 {
        self.history.push(loss);
        if self.released_at.is_none() {
            if let Some((d1, d2)) = self.derivatives() {
                let t = self.config.threshold;
                if d1.abs() < t && d2.abs() < t {
                    self.released_at = Some(self.history.len());
                }
            }
        }
        self.nu()
    }
}
