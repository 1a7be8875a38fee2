//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use netinfer::autodiff::{OpKind, Tape, Tensor, Var};
use netinfer::dynamics::{KuramotoParams, KuramotoTape, Order};
use netinfer::inference::kuramoto_loss;
use netinfer::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Tensor {
    Tensor::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

/// Evaluates `build` on fresh leaves and returns `⟨seed, output⟩`.
fn projected(inputs: &[Tensor], seed: &Tensor, build: &dyn Fn(&mut Tape, &[Var]) -> Result<Var>) -> Result<f64> {
    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|t| tape.param(t.clone())).collect();
    let out = build(&mut tape, &vars)?;
    let value = tape.value(out)?;
    Ok(value.data().iter().zip(seed.data()).map(|(a, b)| a * b).sum())
}

/// Worst relative error between the taped vector-Jacobian product and
/// central differences of `⟨seed, f(x)⟩`, measured per input tensor as
/// `‖g_tape − g_fd‖ / max(‖g_tape‖, ‖g_fd‖)`.
pub fn gradient_check(
    inputs: &[Tensor],
    seed: &Tensor,
    build: impl Fn(&mut Tape, &[Var]) -> Result<Var>,
) -> Result<f64> {
    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|t| tape.param(t.clone())).collect();
    let out = build(&mut tape, &vars)?;
    let grads = tape.backward(out, seed)?;
    let mut worst: f64 = 0.0;
    for (k, input) in inputs.iter().enumerate() {
        let analytic = grads.get_or_zero(vars[k], input);
        let mut numeric = vec![0.0; input.len()];
        for (e, slot) in numeric.iter_mut().enumerate() {
            let mut shifted = inputs.to_vec();
            shifted[k].data_mut()[e] += FD_STEP;
            let up = projected(&shifted, seed, &build)?;
            shifted[k].data_mut()[e] -= 2.0 * FD_STEP;
            let down = projected(&shifted, seed, &build)?;
            *slot = (up - down) / (2.0 * FD_STEP);
        }
        let diff: f64 = analytic.data().iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
        let scale = analytic.norm_l2().max(numeric.iter().map(|n| n * n).sum::<f64>().sqrt());
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        }
    }
    Ok(worst)
}

/// Every primitive, with a representative parameter where one is needed.
pub fn all_ops() -> Vec<OpKind> {
    vec![
        OpKind::Add,
        OpKind::Sub,
        OpKind::Scale(-1.7),
        OpKind::MatMul,
        OpKind::Mul,
        OpKind::Pow(2.0),
        OpKind::Pow(-1.0),
        OpKind::Pow(0.54),
        OpKind::Sin,
        OpKind::Exp,
        OpKind::Tanh,
        OpKind::Sigmoid,
        OpKind::HardSigmoid,
        OpKind::Trace,
        OpKind::Transpose,
        OpKind::DiagProduct,
        OpKind::RowSum,
        OpKind::L1Norm,
        OpKind::L2Norm,
        OpKind::Reshape(vec![]),
        OpKind::Concat,
    ]
}

/// Keeps `x` at least `band` away from each of `kinks`.
fn avoid(x: f64, kinks: &[f64], band: f64) -> f64 {
    kinks.iter().fold(x, |x, &k| if (x - k).abs() < band { k + band.copysign(x - k) * 2.0 } else { x })
}

/// Random operands for `kind` with every dimension at most 8, kept clear
/// of non-differentiable points.
pub fn op_instance(kind: &OpKind, rng: &mut ChaCha8Rng) -> (OpKind, Vec<Tensor>) {
    let (r, c, k) = (rng.random_range(1..=8), rng.random_range(1..=8), rng.random_range(1..=8));
    let mut t = |rows: usize, cols: usize, lo: f64, hi: f64| random_tensor(rng, rows, cols, lo, hi);
    match kind {
        OpKind::Add | OpKind::Sub | OpKind::Mul => (kind.clone(), vec![t(r, c, -2.0, 2.0), t(r, c, -2.0, 2.0)]),
        OpKind::MatMul => (kind.clone(), vec![t(r, k, -2.0, 2.0), t(k, c, -2.0, 2.0)]),
        OpKind::DiagProduct => (kind.clone(), vec![t(r, k, -2.0, 2.0), t(k, r, -2.0, 2.0)]),
        OpKind::Pow(_) => (kind.clone(), vec![t(r, c, 0.5, 2.0)]),
        OpKind::Trace => (kind.clone(), vec![t(r, r, -2.0, 2.0)]),
        OpKind::HardSigmoid => {
            let x = t(r, c, -5.0, 5.0).map(|x| avoid(x, &[-3.0, 3.0], 1e-4));
            (kind.clone(), vec![x])
        }
        OpKind::L1Norm => (kind.clone(), vec![t(r, c, -2.0, 2.0).map(|x| avoid(x, &[0.0], 1e-4))]),
        OpKind::Reshape(_) => (OpKind::Reshape(vec![r * c, 1]), vec![t(r, c, -2.0, 2.0)]),
        OpKind::Concat => (kind.clone(), vec![t(r, c, -2.0, 2.0), t(k, c, -2.0, 2.0)]),
        _ => (kind.clone(), vec![t(r, c, -2.0, 2.0)]),
    }
}

/// Shape of `kind` applied to `inputs`, by evaluating it once.
pub fn output_shape(kind: &OpKind, inputs: &[Tensor]) -> Vec<usize> {
    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|t| tape.constant(t.clone())).collect();
    let out = tape.apply(kind, &vars).unwrap();
    tape.value(out).unwrap().shape().to_vec()
}

/// Finite-difference check of one random instance of `kind`.
pub fn check_op(kind: &OpKind, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (kind, inputs) = op_instance(kind, rng);
    let shape = output_shape(&kind, &inputs);
    let seed = random_tensor(rng, shape[0], shape[1], -1.0, 1.0);
    gradient_check(&inputs, &seed, |tape, vars| tape.apply(&kind, vars))
}

/// Finite-difference check of the full one-step Kuramoto loss, with prior,
/// with respect to the estimated network of an `n`-node instance.
pub fn check_kuramoto_loss(n: usize, order: Order, rng: &mut ChaCha8Rng) -> Result<f64> {
    let omega: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut params = KuramotoParams::first_order(0.8, 1.3, 0.1, omega);
    params.alpha = 1.1;
    let phases = random_tensor(rng, n, 1, 0.0, std::f64::consts::TAU);
    let velocities = random_tensor(rng, n, 1, -0.5, 0.5);
    let observed = random_tensor(rng, n, 1, 0.0, std::f64::consts::TAU);
    let prior = random_tensor(rng, n, n, 0.0, 1.0);
    let a_hat = random_tensor(rng, n, n, 0.0, 1.0);
    let seed = Tensor::ones(&[1, 1]);
    gradient_check(&[a_hat], &seed, |tape, vars| {
        let k = KuramotoTape::new(tape, &params, order, n)?;
        let phi = tape.constant(phases.clone());
        let predicted = match order {
            Order::First => k.step_first(tape, phi, vars[0])?,
            Order::Second => {
                let v = tape.constant(velocities.clone());
                k.step_second(tape, phi, v, vars[0])?.0
            }
        };
        let obs = tape.constant(observed.clone());
        let a0 = tape.constant(prior.clone());
        Ok(kuramoto_loss(tape, predicted, obs, vars[0], Some(a0), 10.0)?.0)
    })
}

/// `k_i = Σ_j a_ij` by explicit loops.
pub fn degree_loop(w: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows];
    for i in 0..rows {
        for j in 0..cols {
            out[i] += w[i * cols + j];
        }
    }
    out
}

/// `½ Σ_jk a_ij a_jk a_ki` by a triple loop.
pub fn triangle_loop(w: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i] += 0.5 * w[i * n + j] * w[j * n + k] * w[k * n + i];
            }
        }
    }
    out
}

pub fn l1_loop(a: &[f64], b: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() {
        total += (a[i] - b[i]).abs();
    }
    total
}

/// `Σ_j a_ij sin(φ_j − φ_i)` by a double loop.
pub fn coupling_loop(w: &[f64], phases: &[f64]) -> Vec<f64> {
    let n = phases.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            out[i] += w[i * n + j] * (phases[j] - phases[i]).sin();
        }
    }
    out
}

/// One deterministic Euler step of `dW_j = εW_j(D_j − κW_j)dt`, with the
/// demand written out as origin-by-origin shares.
pub fn hw_ode_step(w: &[f64], o: &[f64], c: &[f64], alpha: f64, beta: f64, kappa: f64, epsilon: f64, dt: f64) -> Vec<f64> {
    let m = w.len();
    let mut demand = vec![0.0; m];
    for (i, &oi) in o.iter().enumerate() {
        let mut z = 0.0;
        for j in 0..m {
            z += c[i * m + j].powf(beta) * w[j].powf(alpha);
        }
        for j in 0..m {
            demand[j] += oi * c[i * m + j].powf(beta) * w[j].powf(alpha) / z;
        }
    }
    (0..m)
        .map(|j| w[j] + dt * epsilon * w[j] * (demand[j] - kappa * w[j]))
        .collect()
}

/// Sample mean and its standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
