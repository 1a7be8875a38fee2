use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ensemble::{Sample, SampleEnsemble};
use super::loss::{hw_loss, kuramoto_loss, row_normalize, LossTerms};
use super::nu::{NuConfig, NuSchedule};
use crate::autodiff::{Tape, Tensor, Var};
use crate::dynamics::{harris_wilson_step, HarrisWilsonParams, HwSeries, KuramotoParams, KuramotoTape, Order, TimeSeries};
use crate::error::{invalid, Error, Result};
use crate::graphs::AdjacencyMatrix;
use crate::nn::{Mlp, MlpConfig, Optimizer};
use crate::rng::stream;

/// Which terms enter the training objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Data misfit plus the symmetry, trace and prior terms.
    #[default]
    Full,
    /// Data misfit only.
    DataOnly,
}

/// Settings of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    /// Steps predicted per gradient update.
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    pub epochs: usize,
    #[serde(default)]
    pub loss: LossKind,
    #[serde(default)]
    pub nu: NuConfig,
    /// Fraction of leading samples left out of densities.
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    /// Samples are weighted by `exp(−likelihood_scale · loss^weight_power)`.
    #[serde(default = "default_power")]
    pub weight_power: f64,
    #[serde(default = "default_scale")]
    pub likelihood_scale: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_batch() -> usize {
    1
}

fn default_burn_in() -> f64 {
    0.1
}

fn default_power() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

impl TrainingConfig {
    pub fn new(batch_size: usize, epochs: usize, seed: u64) -> Self {
        Self {
            batch_size,
            epochs,
            loss: LossKind::Full,
            nu: NuConfig::default(),
            burn_in: default_burn_in(),
            weight_power: default_power(),
            likelihood_scale: default_scale(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return invalid("batch_size must be at least 1");
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return invalid(format!("burn_in must lie in [0, 1), got {}", self.burn_in));
        }
        if !(self.weight_power > 0.0) {
            return invalid("weight_power must be positive");
        }
        if !(self.likelihood_scale > 0.0 && self.likelihood_scale.is_finite()) {
            return invalid("likelihood_scale must be positive and finite");
        }
        self.nu.validate()
    }
}

/// Observations together with the known dynamics that produced them.
#[derive(Clone, Copy, Debug)]
pub enum Problem<'a> {
    Kuramoto {
        data: &'a TimeSeries,
        params: &'a KuramotoParams,
        order: Order,
    },
    HarrisWilson {
        data: &'a HwSeries,
        params: &'a HarrisWilsonParams,
    },
}

/// A teacher-forced stretch of one segment: simulate `steps` steps from
/// state `start`, feeding the network the window beginning at
/// `input_start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Batch {
    pub segment: usize,
    pub start: usize,
    pub steps: usize,
    pub input_start: usize,
}

impl Problem<'_> {
    fn segment_lens(&self) -> Vec<usize> {
        let ts = match self {
            Problem::Kuramoto { data, .. } => *data,
            Problem::HarrisWilson { data, .. } => &data.destinations,
        };
        ts.segments().iter().map(Vec::len).collect()
    }

    /// Index of the first state that can seed a simulation.
    fn first_start(&self) -> usize {
        match self {
            Problem::Kuramoto { order, .. } => order.history() - 1,
            Problem::HarrisWilson { .. } => 0,
        }
    }

    /// Shape of the estimated network.
    pub fn network_shape(&self) -> (usize, usize) {
        match self {
            Problem::Kuramoto { data, .. } => (data.n_nodes(), data.n_nodes()),
            Problem::HarrisWilson { data, .. } => (data.origins.n_nodes(), data.destinations.n_nodes()),
        }
    }

    fn state_dim(&self) -> usize {
        match self {
            Problem::Kuramoto { data, .. } => data.n_nodes(),
            Problem::HarrisWilson { data, .. } => data.origins.n_nodes() + data.destinations.n_nodes(),
        }
    }

    /// Network input size for a window of `q` states.
    pub fn input_dim(&self, q: usize) -> usize {
        q * self.state_dim()
    }

    fn validate(&self) -> Result<()> {
        match self {
            Problem::Kuramoto { data, params, order } => {
                params.validate(*order, data.n_nodes())?;
                data.require_segment_len(order.history() + 1)
            }
            Problem::HarrisWilson { data, params } => {
                params.validate()?;
                data.destinations.require_segment_len(2)
            }
        }
    }

    /// Splits every segment into batches of at most `batch_size` steps.
    pub fn batches(&self, batch_size: usize, window: usize) -> Result<Vec<Batch>> {
        self.validate()?;
        let lens = self.segment_lens();
        let first = self.first_start();
        let shortest = lens.iter().copied().min().unwrap_or(0);
        if batch_size > shortest - 1 - first {
            return invalid(format!(
                "batch_size {batch_size} exceeds the {} steps available in the shortest segment",
                shortest - 1 - first
            ));
        }
        if window == 0 || window > shortest {
            return invalid(format!("input window {window} must lie in 1..={shortest}"));
        }
        let mut out = Vec::new();
        for (segment, &len) in lens.iter().enumerate() {
            let mut start = first;
            while start + 1 < len {
                let steps = batch_size.min(len - 1 - start);
                out.push(Batch {
                    segment,
                    start,
                    steps,
                    input_start: start.min(len - window),
                });
                start += steps;
            }
        }
        Ok(out)
    }

    fn input(&self, batch: &Batch, window: usize) -> Result<Tensor> {
        let mut data = Vec::with_capacity(self.input_dim(window));
        for t in batch.input_start..batch.input_start + window {
            match self {
                Problem::Kuramoto { data: ts, .. } => data.extend_from_slice(&ts.segments()[batch.segment][t]),
                Problem::HarrisWilson { data: hw, .. } => {
                    data.extend_from_slice(&hw.origins.segments()[batch.segment][t]);
                    data.extend_from_slice(&hw.destinations.segments()[batch.segment][t]);
                }
            }
        }
        Tensor::column(data)
    }
}

/// Simulates one batch from its observed initial state on `network`
/// (already on the tape) and returns `(predicted, observed)` columns.
fn simulate_batch(tape: &mut Tape, problem: &Problem, batch: &Batch, network: Var) -> Result<(Var, Var)> {
    let mut predicted = Vec::with_capacity(batch.steps);
    let mut observed = Vec::with_capacity(batch.steps * problem.network_shape().1);
    match problem {
        Problem::Kuramoto { data, params, order } => {
            let seg = &data.segments()[batch.segment];
            let n = data.n_nodes();
            let stepper = KuramotoTape::new(tape, params, *order, n)?;
            let mut phases = tape.constant(Tensor::column(seg[batch.start].clone())?);
            let mut velocities = match order {
                Order::First => None,
                Order::Second => {
                    let v: Vec<f64> = seg[batch.start]
                        .iter()
                        .zip(&seg[batch.start - 1])
                        .map(|(a, b)| (a - b) / params.dt)
                        .collect();
                    Some(tape.constant(Tensor::column(v)?))
                }
            };
            for k in 1..=batch.steps {
                phases = match velocities {
                    None => stepper.step_first(tape, phases, network)?,
                    Some(v) => {
                        let (p, v) = stepper.step_second(tape, phases, v, network)?;
                        velocities = Some(v);
                        p
                    }
                };
                predicted.push(phases);
                observed.extend_from_slice(&seg[batch.start + k]);
            }
        }
        Problem::HarrisWilson { data, params } => {
            let deterministic = HarrisWilsonParams {
                sigma: 0.0,
                ..(*params).clone()
            };
            let ws = &data.destinations.segments()[batch.segment];
            let os = &data.origins.segments()[batch.segment];
            let mut w = tape.constant(Tensor::column(ws[batch.start].clone())?);
            for k in 0..batch.steps {
                let o = tape.constant(Tensor::column(os[batch.start + k].clone())?);
                w = harris_wilson_step(tape, w, o, network, &deterministic, None)?;
                predicted.push(w);
                observed.extend_from_slice(&ws[batch.start + k + 1]);
            }
        }
    }
    let predicted = tape.concat(&predicted)?;
    let observed = tape.constant(Tensor::column(observed)?);
    Ok((predicted, observed))
}

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct TrainingOutcome {
    pub ensemble: SampleEnsemble,
    pub mlp: Mlp,
    /// Loss terms of every iteration.
    pub history: Vec<LossTerms>,
    /// Iteration after which the prior weight was switched off.
    pub nu_released_at: Option<usize>,
    /// Wall-clock seconds per epoch.
    pub epoch_seconds: Vec<f64>,
}

fn input_window(config: &TrainingConfig, mlp_config: &MlpConfig) -> usize {
    mlp_config.input_window.unwrap_or(config.batch_size)
}

/// A freshly initialized estimator sized for `problem`.
pub fn build_mlp(config: &TrainingConfig, mlp_config: &MlpConfig, problem: &Problem) -> Result<Mlp> {
    mlp_config.validate_for_adjacency()?;
    let (rows, cols) = problem.network_shape();
    let q = input_window(config, mlp_config);
    let mut rng = stream(config.seed, "mlp_init");
    Mlp::new(mlp_config, problem.input_dim(q), rows * cols, &mut rng)
}

/// Network input of the first batch, e.g. as a probe for
/// [`crate::nn::init_delta_on_complete_graph`].
pub fn first_input(config: &TrainingConfig, mlp_config: &MlpConfig, problem: &Problem) -> Result<Tensor> {
    let q = input_window(config, mlp_config);
    let batches = problem.batches(config.batch_size, q)?;
    problem.input(&batches[0], q)
}

/// Trains a new estimator; see [`train_from`].
pub fn train(
    config: &TrainingConfig,
    mlp_config: &MlpConfig,
    problem: &Problem,
    prior: Option<&AdjacencyMatrix>,
) -> Result<TrainingOutcome> {
    let mlp = build_mlp(config, mlp_config, problem)?;
    train_from(config, mlp_config, problem, mlp, prior)
}

/// Runs `epochs` passes over the batches of `problem`, taking one optimizer
/// step per batch and recording every network estimate in the ensemble.
/// Harris-Wilson estimates are row-normalized before simulation and stored
/// normalized.
pub fn train_from(
    config: &TrainingConfig,
    mlp_config: &MlpConfig,
    problem: &Problem,
    mut mlp: Mlp,
    prior: Option<&AdjacencyMatrix>,
) -> Result<TrainingOutcome> {
    config.validate()?;
    mlp_config.validate_for_adjacency()?;
    let q = input_window(config, mlp_config);
    let batches = problem.batches(config.batch_size, q)?;
    let (rows, cols) = problem.network_shape();
    if mlp.input_dim() != problem.input_dim(q) || mlp.output_dim() != rows * cols {
        return invalid(format!(
            "estimator maps {} -> {} values, data need {} -> {}",
            mlp.input_dim(),
            mlp.output_dim(),
            problem.input_dim(q),
            rows * cols
        ));
    }
    let prior = match (prior, problem) {
        (Some(p), Problem::Kuramoto { .. }) => {
            if (p.rows(), p.cols()) != (rows, cols) {
                return invalid(format!("prior is {}x{}, estimate is {rows}x{cols}", p.rows(), p.cols()));
            }
            Some(p.to_tensor())
        }
        (Some(_), Problem::HarrisWilson { .. }) => {
            return invalid("a network prior is only supported for Kuramoto training");
        }
        (None, _) => None,
    };
    let inputs = batches
        .iter()
        .map(|b| problem.input(b, q))
        .collect::<Result<Vec<_>>>()?;

    let mut optimizer = Optimizer::new(mlp_config.optimizer, mlp_config.learning_rate);
    let mut schedule = NuSchedule::new(config.nu.clone());
    let mut ensemble =
        SampleEnsemble::new(rows, cols, config.weight_power, config.burn_in)?.with_likelihood_scale(config.likelihood_scale)?;
    let mut history = Vec::with_capacity(config.epochs * batches.len());
    let mut epoch_seconds = Vec::with_capacity(config.epochs);
    let mut tape = Tape::new();
    let mut iteration: u64 = 0;

    for _ in 0..config.epochs {
        let started = Instant::now();
        for (batch, input) in batches.iter().zip(&inputs) {
            tape.clear();
            let x = tape.constant(input.clone());
            let fwd = mlp.record(&mut tape, x)?;
            let raw = tape.reshape(fwd.output, &[rows, cols])?;
            let network = match problem {
                Problem::Kuramoto { .. } => raw,
                Problem::HarrisWilson { .. } => row_normalize(&mut tape, raw)?,
            };
            let (predicted, observed) = simulate_batch(&mut tape, problem, batch, network)?;
            let (loss, terms) = match (problem, config.loss) {
                (Problem::Kuramoto { .. }, LossKind::Full) => {
                    let prior_var = prior.as_ref().map(|p| tape.constant(p.clone()));
                    kuramoto_loss(&mut tape, predicted, observed, network, prior_var, schedule.nu())?
                }
                _ => hw_loss(&mut tape, predicted, observed)?,
            };
            if !terms.total.is_finite() {
                return Err(Error::NonFiniteLoss { iteration });
            }
            ensemble.push(Sample {
                iteration,
                loss: terms.data,
                network: tape.value(network)?.data().to_vec(),
            })?;
            let grads = tape.backward(loss, &Tensor::ones(&[1, 1]))?;
            let grads: Vec<Tensor> = fwd
                .params
                .iter()
                .zip(mlp.params())
                .map(|(&v, p)| grads.get_or_zero(v, p))
                .collect();
            optimizer.step(&mut mlp.params_mut(), &grads).map_err(|e| match e {
                Error::NonFiniteGradient { .. } => Error::NonFiniteGradient { iteration },
                other => other,
            })?;
            schedule.push(terms.total);
            history.push(terms);
            iteration += 1;
        }
        epoch_seconds.push(started.elapsed().as_secs_f64());
    }
    Ok(TrainingOutcome {
        ensemble,
        mlp,
        history,
        nu_released_at: schedule.released_at(),
        epoch_seconds,
    })
}

/// Teacher-forced misfit `‖T̂ − T‖₂` over every batch when `network` is
/// used for all predictions.
pub fn resimulation_error(problem: &Problem, batch_size: usize, network: &AdjacencyMatrix) -> Result<f64> {
    let (rows, cols) = problem.network_shape();
    if (network.rows(), network.cols()) != (rows, cols) {
        return invalid(format!("network is {}x{}, data need {rows}x{cols}", network.rows(), network.cols()));
    }
    let mut tape = Tape::new();
    let mut total = 0.0;
    for batch in problem.batches(batch_size, 1)? {
        tape.clear();
        let a = tape.constant(network.to_tensor());
        let (p, o) = simulate_batch(&mut tape, problem, &batch, a)?;
        let diff = tape.value(p)?.zip_map(tape.value(o)?, |x, y| x - y);
        total += diff.data().iter().map(|d| d * d).sum::<f64>();
    }
    Ok(total.sqrt())
}
