use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{shape_err, Result};
use crate::graphs::AdjacencyMatrix;

use super::params::{KuramotoParams, Order};

/// Kuramoto integrator recorded on a tape. Constants (the ones vector and
/// the eigenfrequencies) are registered once and reused across steps.
#[derive(Clone, Debug)]
pub struct KuramotoTape {
    n: usize,
    ones: Var,
    omega: Var,
    params: KuramotoParams,
}

impl KuramotoTape {
    pub fn new(tape: &mut Tape, params: &KuramotoParams, order: Order, n: usize) -> Result<Self> {
        params.validate(order, n)?;
        let ones = tape.constant(Tensor::ones(&[n, 1]));
        let omega = tape.constant(Tensor::column(params.omega_for(n)?)?);
        Ok(Self {
            n,
            ones,
            omega,
            params: params.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `c_i = Σ_j a_ij sin(φ_j − φ_i)` as `diag(A Γ)` with
    /// `Γ_ji = sin(φ_j − φ_i)`, an `[n, 1]` column.
    pub fn coupling(&self, tape: &mut Tape, phases: Var, adjacency: Var) -> Result<Var> {
        let shape = tape.value(phases)?.shape().to_vec();
        if shape != [self.n, 1] {
            return shape_err("kuramoto_coupling", format!("phases {shape:?}, expected [{}, 1]", self.n));
        }
        let row = tape.transpose(phases)?;
        // spread[a][b] = φ_b
        let spread = tape.matmul(self.ones, row)?;
        let spread_t = tape.transpose(spread)?;
        let diff = tape.sub(spread_t, spread)?;
        let gamma = tape.sin(diff)?;
        tape.diag_product(adjacency, gamma)
    }

    /// Right-hand side `ω + κ c` of both equations.
    fn forcing(&self, tape: &mut Tape, phases: Var, adjacency: Var) -> Result<Var> {
        let c = self.coupling(tape, phases, adjacency)?;
        let kc = tape.scale(c, self.params.kappa)?;
        tape.add(self.omega, kc)
    }

    /// `φ' = φ + (dt/β)(ω + κ c)`.
    pub fn step_first(&self, tape: &mut Tape, phases: Var, adjacency: Var) -> Result<Var> {
        let f = self.forcing(tape, phases, adjacency)?;
        let inc = tape.scale(f, self.params.dt / self.params.beta)?;
        tape.add(phases, inc)
    }

    /// `v' = v + (dt/α)(ω + κ c − β v)` then `φ' = φ + v' dt`.
    pub fn step_second(&self, tape: &mut Tape, phases: Var, velocities: Var, adjacency: Var) -> Result<(Var, Var)> {
        let p = &self.params;
        let f = self.forcing(tape, phases, adjacency)?;
        let friction = tape.scale(velocities, p.beta)?;
        let accel = tape.sub(f, friction)?;
        let dv = tape.scale(accel, p.dt / p.alpha)?;
        let v_next = tape.add(velocities, dv)?;
        let dphi = tape.scale(v_next, p.dt)?;
        let phi_next = tape.add(phases, dphi)?;
        Ok((phi_next, v_next))
    }
}

/// One recorded first-order step.
pub fn kuramoto_step_first_order(tape: &mut Tape, phases: Var, adjacency: Var, params: &KuramotoParams) -> Result<Var> {
    let n = tape.value(phases)?.rows();
    KuramotoTape::new(tape, params, Order::First, n)?.step_first(tape, phases, adjacency)
}

/// One recorded second-order step returning `(phases', velocities')`.
pub fn kuramoto_step_second_order(
    tape: &mut Tape,
    phases: Var,
    velocities: Var,
    adjacency: Var,
    params: &KuramotoParams,
) -> Result<(Var, Var)> {
    let n = tape.value(phases)?.rows();
    KuramotoTape::new(tape, params, Order::Second, n)?.step_second(tape, phases, velocities, adjacency)
}

/// Explicit double sum `Σ_j a_ij sin(φ_j − φ_i)`.
pub fn coupling_sums(phases: &[f64], a: &AdjacencyMatrix) -> Vec<f64> {
    (0..phases.len())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(phases)
                .map(|(&w, &pj)| if w == 0.0 { 0.0 } else { w * (pj - phases[i]).sin() })
                .sum()
        })
        .collect()
}

/// Untaped first-order step. `noise` holds standard normal draws, scaled
/// here by `σ √dt`.
pub fn first_order_plain(
    phases: &[f64],
    a: &AdjacencyMatrix,
    params: &KuramotoParams,
    omega: &[f64],
    noise: Option<&[f64]>,
) -> Vec<f64> {
    let c = coupling_sums(phases, a);
    let amp = params.sigma * params.dt.sqrt();
    (0..phases.len())
        .map(|i| {
            let xi = noise.map_or(0.0, |z| amp * z[i]);
            phases[i] + params.dt / params.beta * (omega[i] + params.kappa * c[i]) + xi
        })
        .collect()
}

/// Untaped second-order step. Noise enters the velocity as a force
/// increment `σ √dt ξ / α`.
pub fn second_order_plain(
    phases: &[f64],
    velocities: &[f64],
    a: &AdjacencyMatrix,
    params: &KuramotoParams,
    omega: &[f64],
    noise: Option<&[f64]>,
) -> (Vec<f64>, Vec<f64>) {
    let c = coupling_sums(phases, a);
    let amp = params.sigma * params.dt.sqrt() / params.alpha;
    let v: Vec<f64> = (0..phases.len())
        .map(|i| {
            let force = omega[i] + params.kappa * c[i] - params.beta * velocities[i];
            velocities[i] + params.dt / params.alpha * force + noise.map_or(0.0, |z| amp * z[i])
        })
        .collect();
    let phi = phases.iter().zip(&v).map(|(p, vi)| p + vi * params.dt).collect();
    (phi, v)
}
