use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::harris_wilson::harris_wilson_step_plain;
use super::kuramoto::{first_order_plain, second_order_plain};
use super::params::{HarrisWilsonParams, KuramotoParams, Order};
use super::series::{HwSeries, TimeSeries};
use crate::error::{invalid, Error, Result};
use crate::graphs::AdjacencyMatrix;
use crate::rng::{stream, Rng};

fn normals(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Independent Kuramoto trajectories from phases drawn on `[0, 2π)` (and
/// zero initial velocity for the second-order model). Initial conditions
/// and noise come from separate streams, so changing `σ` keeps the
/// starting phases.
pub fn generate_kuramoto_dataset(
    a: &AdjacencyMatrix,
    params: &KuramotoParams,
    order: Order,
    n_segments: usize,
    segment_len: usize,
    seed: u64,
) -> Result<TimeSeries> {
    let n = a.rows();
    if !a.is_square() {
        return invalid("Kuramoto network must be square");
    }
    params.validate(order, n)?;
    if n_segments == 0 {
        return invalid("at least one segment is required");
    }
    if segment_len < order.history() + 1 {
        return invalid(format!("segments need at least {} states", order.history() + 1));
    }
    let omega = params.omega_for(n)?;
    let mut init = stream(seed, "kuramoto_init");
    let mut noise_rng = stream(seed, "kuramoto_noise");
    let noisy = params.sigma > 0.0;
    let mut segments = Vec::with_capacity(n_segments);
    for _ in 0..n_segments {
        let mut phi: Vec<f64> = (0..n).map(|_| init.random_range(0.0..TAU)).collect();
        let mut vel = vec![0.0; n];
        let mut states = Vec::with_capacity(segment_len);
        states.push(phi.clone());
        for _ in 1..segment_len {
            let xi = noisy.then(|| normals(&mut noise_rng, n));
            match order {
                Order::First => phi = first_order_plain(&phi, a, params, &omega, xi.as_deref()),
                Order::Second => {
                    (phi, vel) = second_order_plain(&phi, &vel, a, params, &omega, xi.as_deref());
                }
            }
            states.push(phi.clone());
        }
        segments.push(states);
    }
    TimeSeries::new(n, segments)
}

/// Settings for generating Harris-Wilson data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HwDataSpec {
    pub n_segments: usize,
    pub segment_len: usize,
    /// Volatility of the origin sizes, which follow a reflected Wiener
    /// process.
    #[serde(default = "default_origin_sigma")]
    pub origin_sigma: f64,
    /// Initial origin and destination sizes are uniform on this range.
    #[serde(default = "default_size_range")]
    pub size_range: (f64, f64),
}

fn default_origin_sigma() -> f64 {
    0.1
}

fn default_size_range() -> (f64, f64) {
    (0.1, 1.0)
}

/// Harris-Wilson trajectories on cost network `c` (`N × M`).
pub fn generate_hw_dataset(
    c: &AdjacencyMatrix,
    params: &HarrisWilsonParams,
    spec: &HwDataSpec,
    seed: u64,
) -> Result<HwSeries> {
    params.validate()?;
    if c.weights().iter().any(|&x| x <= 0.0) {
        return invalid("cost network entries must be positive");
    }
    let (lo, hi) = spec.size_range;
    if !(lo > 0.0 && lo < hi) {
        return invalid(format!("size range [{lo}, {hi}] must be positive and nonempty"));
    }
    if spec.n_segments == 0 || spec.segment_len < 2 {
        return invalid("need at least one segment of two states");
    }
    let (n, m) = (c.rows(), c.cols());
    let mut init = stream(seed, "hw_init");
    let mut noise_rng = stream(seed, "hw_noise");
    let amp_o = spec.origin_sigma * params.dt.sqrt();
    let (mut ws, mut os) = (Vec::new(), Vec::new());
    for _ in 0..spec.n_segments {
        let mut o: Vec<f64> = (0..n).map(|_| init.random_range(lo..hi)).collect();
        let mut w: Vec<f64> = (0..m).map(|_| init.random_range(lo..hi)).collect();
        let (mut wseg, mut oseg) = (vec![w.clone()], vec![o.clone()]);
        for _ in 1..spec.segment_len {
            let xi = (params.sigma > 0.0).then(|| normals(&mut noise_rng, m));
            w = harris_wilson_step_plain(&w, &o, c.weights(), params, xi.as_deref());
            if spec.origin_sigma > 0.0 {
                for oi in &mut o {
                    let z: f64 = noise_rng.sample(StandardNormal);
                    *oi = (*oi + amp_o * z).abs().max(1e-12);
                }
            }
            wseg.push(w.clone());
            oseg.push(o.clone());
        }
        ws.push(wseg);
        os.push(oseg);
    }
    HwSeries::new(TimeSeries::new(m, ws)?, TimeSeries::new(n, os)?)
}

/// Settings for the line-cut experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerCutSpec {
    /// States recorded after the delay.
    pub window_len: usize,
    /// Seconds between the cut and the first recorded state.
    pub record_delay: f64,
    #[serde(default = "default_max_steps")]
    pub max_equilibration_steps: usize,
    /// Equilibrium when `|φ̇_i| ≤ tol · max(|φ_i|, 1)` for every node.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_max_steps() -> usize {
    1_000_000
}

fn default_tolerance() -> f64 {
    0.01
}

/// Recorded response to a line cut.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerCutRecord {
    pub series: TimeSeries,
    /// The network with the cut lines removed.
    pub perturbed: AdjacencyMatrix,
    pub equilibration_steps: usize,
}

/// A settled state of the second-order model.
#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium {
    pub phases: Vec<f64>,
    pub velocities: Vec<f64>,
    pub steps: usize,
}

/// Runs the noiseless second-order model on `a` from all phases at 1 and
/// rest until `|φ̇_i| ≤ tol · max(|φ_i|, 1)` holds for every node.
pub fn equilibrate(a: &AdjacencyMatrix, params: &KuramotoParams, spec: &PowerCutSpec) -> Result<Equilibrium> {
    let n = a.rows();
    params.validate(Order::Second, n)?;
    let omega = params.omega_for(n)?;
    let (mut phi, mut vel) = (vec![1.0; n], vec![0.0; n]);
    let settled = |phi: &[f64], vel: &[f64]| -> f64 {
        phi.iter()
            .zip(vel)
            .map(|(p, v)| v.abs() / p.abs().max(1.0))
            .fold(0.0, f64::max)
    };
    let mut steps = 0;
    loop {
        (phi, vel) = second_order_plain(&phi, &vel, a, params, &omega, None);
        steps += 1;
        let residual = settled(&phi, &vel);
        if residual <= spec.tolerance {
            return Ok(Equilibrium {
                phases: phi,
                velocities: vel,
                steps,
            });
        }
        if steps >= spec.max_equilibration_steps || !residual.is_finite() {
            return Err(Error::NotEquilibrated {
                max_steps: spec.max_equilibration_steps,
                residual,
            });
        }
    }
}

/// Absolute power carried by each line, `|a_ij sin(φ_j − φ_i)|`, for the
/// edges `i < j` of `a`.
pub fn line_loads(a: &AdjacencyMatrix, phases: &[f64]) -> Result<Vec<((usize, usize), f64)>> {
    if phases.len() != a.rows() || !a.is_square() {
        return invalid(format!("{} phases for a {}x{} network", phases.len(), a.rows(), a.cols()));
    }
    Ok(a.undirected_edges()
        .into_iter()
        .map(|(i, j, w)| ((i, j), (w * (phases[j] - phases[i]).sin()).abs()))
        .collect())
}

/// Picks `count` lines to cut at random among those carrying at least the
/// median load, keeping the grid connected. Unloaded lines are skipped
/// because removing them leaves no trace in the dynamics.
pub fn select_loaded_cuts(
    a: &AdjacencyMatrix,
    phases: &[f64],
    count: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    let loads = line_loads(a, phases)?;
    if loads.is_empty() {
        return invalid("the network has no lines to cut");
    }
    let mut sorted: Vec<f64> = loads.iter().map(|l| l.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mut candidates: Vec<(usize, usize)> = loads.iter().filter(|l| l.1 >= median).map(|l| l.0).collect();
    candidates.shuffle(&mut stream(seed, "power_cut_edges"));
    let mut cut = a.clone();
    let mut chosen = Vec::with_capacity(count);
    for (i, j) in candidates {
        if chosen.len() == count {
            break;
        }
        cut.set_symmetric(i, j, 0.0)?;
        if cut.is_connected() {
            chosen.push((i, j));
        } else {
            cut.set_symmetric(i, j, a.get(i, j))?;
        }
    }
    if chosen.len() < count {
        return invalid(format!(
            "only {} loaded lines can be cut without disconnecting the grid, {count} requested",
            chosen.len()
        ));
    }
    Ok(chosen)
}

/// Equilibrates the second-order model from all phases at 1, removes the
/// given lines and records the transient.
pub fn simulate_power_cut(
    a0: &AdjacencyMatrix,
    cut_edges: &[(usize, usize)],
    params: &KuramotoParams,
    spec: &PowerCutSpec,
    seed: u64,
) -> Result<PowerCutRecord> {
    let n = a0.rows();
    a0.validate_undirected()?;
    params.validate(Order::Second, n)?;
    if spec.window_len < 1 {
        return invalid("window_len must be positive");
    }
    if !(spec.record_delay >= 0.0) {
        return invalid("record_delay must be nonnegative");
    }
    let omega = params.omega_for(n)?;
    let mut perturbed = a0.clone();
    for &(i, j) in cut_edges {
        if i >= n || j >= n || i == j {
            return invalid(format!("cannot cut edge ({i}, {j}) in a {n}-node network"));
        }
        perturbed.set_symmetric(i, j, 0.0)?;
    }

    let Equilibrium {
        phases: mut phi,
        velocities: mut vel,
        steps,
    } = equilibrate(a0, params, spec)?;
    let mut noise_rng = stream(seed, "power_cut_noise");
    let noisy = params.sigma > 0.0;
    let mut advance = |phi: &mut Vec<f64>, vel: &mut Vec<f64>| {
        let xi = noisy.then(|| normals(&mut noise_rng, n));
        (*phi, *vel) = second_order_plain(phi, vel, &perturbed, params, &omega, xi.as_deref());
    };
    let delay_steps = (spec.record_delay / params.dt).round() as usize;
    for _ in 0..delay_steps {
        advance(&mut phi, &mut vel);
    }
    let mut states = vec![phi.clone()];
    for _ in 1..spec.window_len {
        advance(&mut phi, &mut vel);
        states.push(phi.clone());
    }
    Ok(PowerCutRecord {
        series: TimeSeries::new(n, vec![states])?,
        perturbed,
        equilibration_steps: steps,
    })
}
