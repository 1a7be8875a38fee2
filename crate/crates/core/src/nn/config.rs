use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Elementwise activation applied after a layer's affine map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Sigmoid,
    HardSigmoid,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => crate::autodiff::sigmoid(x),
            Activation::HardSigmoid => crate::autodiff::hard_sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// True when every output lies in `[0, 1]`.
    pub fn is_unit_bounded(self) -> bool {
        matches!(self, Activation::Sigmoid | Activation::HardSigmoid)
    }
}

/// How a layer's bias is created, if at all.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BiasSpec", into = "BiasSpec")]
pub enum BiasInit {
    Off,
    /// Uniform on `[-1/√fan_in, 1/√fan_in]`, the same rule as the weights.
    Default,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum BiasSpec {
    Interval([f64; 2]),
    Keyword(String),
}

impl TryFrom<BiasSpec> for BiasInit {
    type Error = String;

    fn try_from(spec: BiasSpec) -> std::result::Result<Self, String> {
        match spec {
            BiasSpec::Interval([lo, hi]) if lo <= hi => Ok(BiasInit::Uniform { lo, hi }),
            BiasSpec::Interval([lo, hi]) => Err(format!("empty bias interval [{lo}, {hi}]")),
            BiasSpec::Keyword(k) => match k.as_str() {
                "off" | "none" | "~" => Ok(BiasInit::Off),
                "default" => Ok(BiasInit::Default),
                other => Err(format!("unknown bias init `{other}`")),
            },
        }
    }
}

impl From<BiasInit> for BiasSpec {
    fn from(b: BiasInit) -> Self {
        match b {
            BiasInit::Off => BiasSpec::Keyword("off".into()),
            BiasInit::Default => BiasSpec::Keyword("default".into()),
            BiasInit::Uniform { lo, hi } => BiasSpec::Interval([lo, hi]),
        }
    }
}

/// A default value plus per-layer overrides. Override keys are layer
/// indices; negative keys count from the end (`-1` is the last layer).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec<T> {
    pub default: T,
    #[serde(default = "BTreeMap::new", skip_serializing_if = "BTreeMap::is_empty")]
    pub layer_specific: BTreeMap<String, T>,
}

impl<T: Clone> LayerSpec<T> {
    pub fn uniform(default: T) -> Self {
        Self {
            default,
            layer_specific: BTreeMap::new(),
        }
    }

    pub fn with(mut self, index: i64, value: T) -> Self {
        self.layer_specific.insert(index.to_string(), value);
        self
    }

    /// Expands to one value per layer for `count` layers.
    pub fn resolve(&self, count: usize, what: &str) -> Result<Vec<T>> {
        let mut out = vec![self.default.clone(); count];
        for (key, value) in &self.layer_specific {
            let idx: i64 = key
                .trim()
                .parse()
                .map_err(|_| crate::Error::InvalidParameter(format!("{what}: bad layer index `{key}`")))?;
            let resolved = if idx < 0 { count as i64 + idx } else { idx };
            if resolved < 0 || resolved >= count as i64 {
                return invalid(format!(
                    "{what}: layer index {idx} outside [0, {count})"
                ));
            }
            out[resolved as usize] = value.clone();
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

/// Architecture and optimizer settings for the estimator network.
///
/// `num_layers` counts hidden layers, so the network has `num_layers + 1`
/// affine maps. `nodes_per_layer` overrides index hidden layers; `biases`
/// and `activations` index affine layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpConfig {
    pub num_layers: usize,
    pub nodes_per_layer: LayerSpec<usize>,
    #[serde(default = "no_bias")]
    pub biases: LayerSpec<BiasInit>,
    pub activations: LayerSpec<Activation>,
    /// Number of time steps fed as input; `None` uses the batch size.
    #[serde(default)]
    pub input_window: Option<usize>,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
}

fn no_bias() -> LayerSpec<BiasInit> {
    LayerSpec::uniform(BiasInit::Off)
}

fn default_learning_rate() -> f64 {
    0.002
}

fn default_optimizer() -> OptimizerKind {
    OptimizerKind::Adam
}

impl MlpConfig {
    /// 5 hidden layers of 20, no bias, tanh, hard sigmoid output, Adam 0.002.
    pub fn kuramoto_default() -> Self {
        Self {
            num_layers: 5,
            nodes_per_layer: LayerSpec::uniform(20),
            biases: no_bias(),
            activations: LayerSpec::uniform(Activation::Tanh).with(-1, Activation::HardSigmoid),
            input_window: None,
            learning_rate: default_learning_rate(),
            optimizer: OptimizerKind::Adam,
        }
    }

    /// 2 hidden layers of 20, no bias, tanh, sigmoid output, Adam 0.002.
    pub fn harris_wilson_default() -> Self {
        Self {
            num_layers: 2,
            activations: LayerSpec::uniform(Activation::Tanh).with(-1, Activation::Sigmoid),
            ..Self::kuramoto_default()
        }
    }

    pub fn hidden_widths(&self) -> Result<Vec<usize>> {
        let widths = self.nodes_per_layer.resolve(self.num_layers, "nodes_per_layer")?;
        if widths.contains(&0) {
            return invalid("nodes_per_layer: widths must be positive");
        }
        Ok(widths)
    }

    pub fn layer_activations(&self) -> Result<Vec<Activation>> {
        self.activations.resolve(self.num_layers + 1, "activations")
    }

    pub fn layer_biases(&self) -> Result<Vec<BiasInit>> {
        self.biases.resolve(self.num_layers + 1, "biases")
    }

    pub fn validate(&self) -> Result<()> {
        self.hidden_widths()?;
        self.layer_activations()?;
        self.layer_biases()?;
        if self.input_window == Some(0) {
            return invalid("input_window must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return invalid(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        Ok(())
    }

    /// Checks that the network can emit an adjacency matrix: the output
    /// activation must map into `[0, 1]`.
    pub fn validate_for_adjacency(&self) -> Result<()> {
        self.validate()?;
        let last = *self.layer_activations()?.last().expect("at least one layer");
        if !last.is_unit_bounded() {
            return invalid(format!(
                "last-layer activation {last:?} does not map into [0, 1]"
            ));
        }
        Ok(())
    }
}
