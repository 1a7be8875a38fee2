use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{invalid, shape_err, Error, Result};
use crate::rng::Rng;

use super::config::{Activation, BiasInit, MlpConfig};

/// One affine map followed by an activation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Shape `[out, in]`.
    pub weight: Tensor,
    /// Shape `[out, 1]` when present.
    pub bias: Option<Tensor>,
    pub activation: Activation,
}

/// Multilayer perceptron. Parameters are ordered layer by layer, weight
/// before bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
}

/// Parameter handles recorded for one forward pass.
pub struct RecordedForward {
    pub output: Var,
    pub params: Vec<Var>,
}

impl Mlp {
    /// Builds a network from `config` with weights uniform on
    /// `[-1/√fan_in, 1/√fan_in]`.
    pub fn new(config: &MlpConfig, input_dim: usize, output_dim: usize, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        if input_dim == 0 || output_dim == 0 {
            return invalid("network input and output dimensions must be positive");
        }
        let mut widths = vec![input_dim];
        widths.extend(config.hidden_widths()?);
        widths.push(output_dim);
        let activations = config.layer_activations()?;
        let biases = config.layer_biases()?;

        let layers = widths
            .windows(2)
            .zip(activations.into_iter().zip(biases))
            .map(|(w, (activation, bias))| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let weight = Tensor::from_fn(fan_out, fan_in, |_, _| rng.random_range(-bound..=bound));
                let bias = match bias {
                    BiasInit::Off => None,
                    BiasInit::Default => Some(Tensor::from_fn(fan_out, 1, |_, _| {
                        rng.random_range(-bound..=bound)
                    })),
                    BiasInit::Uniform { lo, hi } => Some(Tensor::from_fn(fan_out, 1, |_, _| {
                        if hi > lo {
                            rng.random_range(lo..=hi)
                        } else {
                            lo
                        }
                    })),
                };
                Layer {
                    weight,
                    bias,
                    activation,
                }
            })
            .collect();
        Ok(Self { layers })
    }

    /// Assembles a network from explicit layers, checking that consecutive
    /// shapes compose.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return invalid("a network needs at least one layer");
        }
        for (k, layer) in layers.iter().enumerate() {
            if !layer.weight.is_matrix() {
                return shape_err("mlp", format!("layer {k} weight is not a matrix"));
            }
            if let Some(b) = &layer.bias {
                if b.shape() != [layer.weight.rows(), 1] {
                    return shape_err(
                        "mlp",
                        format!("layer {k} bias {:?} for weight {:?}", b.shape(), layer.weight.shape()),
                    );
                }
            }
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].weight.rows() != pair[1].weight.cols() {
                return shape_err(
                    "mlp",
                    format!(
                        "layer {k} emits {} values but layer {} expects {}",
                        pair[0].weight.rows(),
                        k + 1,
                        pair[1].weight.cols()
                    ),
                );
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].weight.rows()
    }

    pub fn num_params(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn params(&self) -> Vec<&Tensor> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(&l.weight);
            if let Some(b) = &l.bias {
                out.push(b);
            }
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            out.push(&mut l.weight);
            if let Some(b) = &mut l.bias {
                out.push(b);
            }
        }
        out
    }

    fn check_input(&self, input: &Tensor) -> Result<()> {
        if input.len() != self.input_dim() {
            return shape_err(
                "mlp_forward",
                format!("input {:?} has {} values, network expects {}", input.shape(), input.len(), self.input_dim()),
            );
        }
        Ok(())
    }

    /// Records the forward pass on `tape`, registering every parameter as a
    /// differentiable leaf. `input` must hold `input_dim` values.
    pub fn record(&self, tape: &mut Tape, input: Var) -> Result<RecordedForward> {
        self.check_input(tape.value(input)?)?;
        let mut h = tape.reshape(input, &[self.input_dim(), 1])?;
        let mut params = Vec::new();
        for layer in &self.layers {
            let w = tape.param(layer.weight.clone());
            params.push(w);
            let mut z = tape.matmul(w, h)?;
            if let Some(b) = &layer.bias {
                let b = tape.param(b.clone());
                params.push(b);
                z = tape.add(z, b)?;
            }
            h = match layer.activation {
                Activation::Tanh => tape.tanh(z)?,
                Activation::Sigmoid => tape.sigmoid(z)?,
                Activation::HardSigmoid => tape.hard_sigmoid(z)?,
                Activation::Identity => z,
            };
        }
        Ok(RecordedForward { output: h, params })
    }

    /// Plain evaluation; returns a `[output_dim, 1]` column.
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input)?;
        if !input.all_finite() {
            return Err(Error::NonFinite("network input".into()));
        }
        let mut h = input.reshape(&[self.input_dim(), 1])?;
        for (k, layer) in self.layers.iter().enumerate() {
            h = self.pre_activation(k, &h)?.map(|x| layer.activation.apply(x));
        }
        Ok(h)
    }

    fn pre_activation(&self, k: usize, h: &Tensor) -> Result<Tensor> {
        let layer = &self.layers[k];
        let mut z = layer.weight.matmul(h)?;
        if let Some(b) = &layer.bias {
            z = z.zip_map(b, |x, y| x + y);
        }
        Ok(z)
    }

    /// Output of all layers but the last.
    fn penultimate(&self, input: &Tensor) -> Result<Tensor> {
        let mut h = input.reshape(&[self.input_dim(), 1])?;
        for (k, layer) in self.layers[..self.layers.len() - 1].iter().enumerate() {
            h = self.pre_activation(k, &h)?.map(|x| layer.activation.apply(x));
        }
        Ok(h)
    }

    /// Last-layer pre-activations for `input`.
    pub fn output_pre_activation(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input)?;
        let h = self.penultimate(input)?;
        self.pre_activation(self.layers.len() - 1, &h)
    }

    /// Adjusts the last layer so that every output pre-activation on
    /// `probe` is at least `3 + margin`, making the hard-sigmoid output
    /// exactly one on the probe.
    ///
    /// Each output row `w` is shifted along the penultimate activation `h`:
    /// `w ← w + (3 + margin − w·h) h / |h|²`. Rows are otherwise untouched,
    /// so the random structure of the layer survives.
    pub fn saturate_on(&mut self, probe: &Tensor, margin: f64) -> Result<()> {
        self.check_input(probe)?;
        let last = self.layers.len() - 1;
        if self.layers[last].activation != Activation::HardSigmoid {
            return Err(Error::Saturation(format!(
                "last activation is {:?}, not hard_sigmoid",
                self.layers[last].activation
            )));
        }
        if !(margin >= 0.0) {
            return invalid(format!("saturation margin must be nonnegative, got {margin}"));
        }
        let h = self.penultimate(probe)?;
        let has_bias = self.layers[last].bias.is_some();
        let norm_sq = h.data().iter().map(|v| v * v).sum::<f64>() + if has_bias { 1.0 } else { 0.0 };
        if norm_sq == 0.0 {
            return Err(Error::Saturation(
                "probe maps to an all-zero penultimate activation".into(),
            ));
        }
        let target = 3.0 + margin;
        for _ in 0..8 {
            let z = self.pre_activation(last, &h)?;
            if z.data().iter().all(|&v| v >= target) {
                break;
            }
            let layer = &mut self.layers[last];
            let cols = layer.weight.cols();
            for (row, &zk) in z.data().iter().enumerate() {
                if zk >= target {
                    continue;
                }
                // nudge slightly past the target so rounding cannot leave it short
                let step = (target - zk + f64::EPSILON * target) / norm_sq;
                let w = &mut layer.weight.data_mut()[row * cols..(row + 1) * cols];
                for (wi, hi) in w.iter_mut().zip(h.data()) {
                    *wi += step * hi;
                }
                if let Some(b) = &mut layer.bias {
                    b.data_mut()[row] += step;
                }
            }
        }
        let out = self.forward(probe)?;
        if out.data().iter().any(|&v| v != 1.0) {
            return Err(Error::Saturation(
                "output did not reach one on the probe".into(),
            ));
        }
        Ok(())
    }
}

/// Returns a copy of `mlp` whose prior on the probe is the complete graph:
/// every output equals one exactly.
pub fn init_delta_on_complete_graph(mlp: &Mlp, probe: &Tensor, margin: f64) -> Result<Mlp> {
    let mut out = mlp.clone();
    out.saturate_on(probe, margin)?;
    Ok(out)
}

/// Concatenates state vectors in time order: the column-wise flattening of
/// an `N × q` window.
pub fn flatten_window(states: &[&[f64]]) -> Result<Tensor> {
    let data: Vec<f64> = states.iter().flat_map(|s| s.iter().copied()).collect();
    Tensor::column(data)
}
