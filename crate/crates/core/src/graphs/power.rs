use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::AdjacencyMatrix;
use crate::error::{invalid, Result};
use crate::rng::{stream, Rng};

/// Per-kilometre line constants for overhead transmission lines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLineConstants {
    /// Ω per km.
    pub resistance: f64,
    /// H per km.
    pub inductance: f64,
    /// F per km.
    pub capacitance: f64,
    /// Grid frequency in Hz.
    pub frequency: f64,
    /// Multiply the frequency by 2π inside the impedance formulas.
    pub angular: bool,
}

impl Default for PowerLineConstants {
    fn default() -> Self {
        Self {
            resistance: 0.0276,
            inductance: 0.41e-3,
            capacitance: 0.150e-6,
            frequency: 50.0,
            angular: true,
        }
    }
}

impl PowerLineConstants {
    pub fn omega(&self) -> f64 {
        if self.angular {
            2.0 * std::f64::consts::PI * self.frequency
        } else {
            self.frequency
        }
    }

    /// Series impedance and shunt admittance per km.
    fn per_km(&self) -> (Complex64, Complex64) {
        let w = self.omega();
        (
            Complex64::new(self.resistance, w * self.inductance),
            Complex64::new(0.0, w * self.capacitance),
        )
    }

    /// Long-line impedance `Z₀ sinh(γ l)` of a line of `length_km`.
    pub fn impedance(&self, length_km: f64) -> Complex64 {
        let (z, y) = self.per_km();
        let z0 = (z / y).sqrt();
        let gamma = (z * y).sqrt();
        z0 * (gamma * length_km).sinh()
    }
}

/// Raw coupling weight `|Y| U²` of a line, in MW for `voltage_kv` in kV.
/// Lines longer than 10 km count double and longer than 80 km triple.
pub fn line_weight(length_km: f64, voltage_kv: f64, constants: &PowerLineConstants) -> Result<f64> {
    if !(length_km > 0.0 && length_km.is_finite()) {
        return invalid(format!("line length must be positive, got {length_km}"));
    }
    if !(voltage_kv > 0.0 && voltage_kv.is_finite()) {
        return invalid(format!("line voltage must be positive, got {voltage_kv}"));
    }
    let admittance = constants.impedance(length_km).inv().norm();
    let multiplier = if length_km > 80.0 {
        3.0
    } else if length_km > 10.0 {
        2.0
    } else {
        1.0
    };
    Ok(multiplier * admittance * voltage_kv * voltage_kv)
}

/// Divides by the mean, truncates to `[0, 1]`, then re-draws every weight
/// that landed exactly on 1 uniformly from `[0.9, 1.0]`.
pub fn normalize_weights(raw: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return invalid("cannot normalize an empty weight list");
    }
    if raw.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return invalid("weights must be finite and nonnegative");
    }
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    if mean <= 0.0 {
        return invalid("all weights are zero");
    }
    Ok(raw
        .iter()
        .map(|&w| {
            let a = (w / mean).min(1.0);
            if a == 1.0 {
                rng.random_range(0.9..=1.0)
            } else {
                a
            }
        })
        .collect())
}

/// Applies [`normalize_weights`] to the edges of an undirected network.
pub fn normalize_network(a: &AdjacencyMatrix, seed: u64) -> Result<AdjacencyMatrix> {
    let edges = a.undirected_edges();
    let raw: Vec<f64> = edges.iter().map(|e| e.2).collect();
    let mut rng = stream(seed, "normalize_weights");
    let normalized = normalize_weights(&raw, &mut rng)?;
    let mut out = AdjacencyMatrix::zeros(a.rows(), a.cols());
    for (&(i, j, _), w) in edges.iter().zip(normalized) {
        out.set_symmetric(i, j, w)?;
    }
    Ok(out)
}

/// Node powers summing to zero. `stations` pins `(node, capacity)` pairs;
/// every other node draws from `U[-200, 200]` and the free nodes are then
/// shifted by a common constant to balance the total.
pub fn assign_powers(n_nodes: usize, stations: &[(usize, f64)], seed: u64) -> Result<Vec<f64>> {
    if stations.len() > n_nodes {
        return invalid(format!("{} stations for {n_nodes} nodes", stations.len()));
    }
    let mut pinned = vec![None; n_nodes];
    for &(node, cap) in stations {
        if node >= n_nodes {
            return invalid(format!("station node {node} outside 0..{n_nodes}"));
        }
        if !cap.is_finite() {
            return invalid(format!("station {node} has non-finite capacity"));
        }
        if pinned[node].replace(cap).is_some() {
            return invalid(format!("station node {node} listed twice"));
        }
    }
    let mut rng = stream(seed, "assign_powers");
    let mut p: Vec<f64> = pinned
        .iter()
        .map(|s| s.unwrap_or_else(|| rng.random_range(-200.0..=200.0)))
        .collect();
    let free: Vec<usize> = (0..n_nodes).filter(|&i| pinned[i].is_none()).collect();
    let total: f64 = p.iter().sum();
    if free.is_empty() {
        if total.abs() > 1e-9 {
            return invalid(format!("station capacities sum to {total} and no free node can balance them"));
        }
        return Ok(p);
    }
    let shift = total / free.len() as f64;
    for &i in &free {
        p[i] -= shift;
    }
    // one correction pass absorbs the rounding left by the shift
    let residual: f64 = p.iter().sum();
    p[free[0]] -= residual;
    Ok(p)
}

/// Shape of a synthetic transmission grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_nodes: usize,
    /// Edges added on top of a random spanning tree.
    pub extra_edges: usize,
    pub length_km: (f64, f64),
    pub voltages_kv: Vec<f64>,
    #[serde(default)]
    pub constants: PowerLineConstants,
}

impl GridSpec {
    pub fn new(n_nodes: usize, extra_edges: usize) -> Self {
        Self {
            n_nodes,
            extra_edges,
            length_km: (1.0, 100.0),
            voltages_kv: vec![275.0, 400.0],
            constants: PowerLineConstants::default(),
        }
    }
}

/// A connected random grid: a random recursive tree plus extra chords, with
/// line physics weights normalized into `[0, 1]`.
pub fn synthetic_power_grid(spec: &GridSpec, seed: u64) -> Result<AdjacencyMatrix> {
    let n = spec.n_nodes;
    if n < 2 {
        return invalid("a power grid needs at least two nodes");
    }
    let max_extra = n * (n - 1) / 2 - (n - 1);
    if spec.extra_edges > max_extra {
        return invalid(format!("{} extra edges exceed the {max_extra} available", spec.extra_edges));
    }
    let (lo, hi) = spec.length_km;
    if !(lo > 0.0 && lo <= hi) {
        return invalid(format!("line length range [{lo}, {hi}] is not positive"));
    }
    if spec.voltages_kv.is_empty() {
        return invalid("no line voltages given");
    }
    let mut rng = stream(seed, "synthetic_power_grid");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(n - 1 + spec.extra_edges);
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        edges.push((order[k].min(parent), order[k].max(parent)));
    }
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .collect();
    candidates.shuffle(&mut rng);
    edges.extend(candidates.into_iter().take(spec.extra_edges));

    let mut raw = AdjacencyMatrix::zeros(n, n);
    for &(i, j) in &edges {
        let length = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let voltage = spec.voltages_kv[rng.random_range(0..spec.voltages_kv.len())];
        raw.set_symmetric(i, j, line_weight(length, voltage, &spec.constants)?)?;
    }
    normalize_network(&raw, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn voltage_scales_quadratically() {
        let c = PowerLineConstants::default();
        let w1 = line_weight(37.0, 275.0, &c).unwrap();
        let w2 = line_weight(37.0, 550.0, &c).unwrap();
        assert!((w2 / w1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn multiplier_jumps_at_ten_km() {
        let c = PowerLineConstants::default();
        let below = line_weight(10.0, 400.0, &c).unwrap();
        let above = line_weight(10.0 + 1e-9, 400.0, &c).unwrap();
        assert!((above / below - 2.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        let c = PowerLineConstants::default();
        assert!(line_weight(0.0, 400.0, &c).is_err());
        assert!(line_weight(5.0, -1.0, &c).is_err());
    }

    #[test]
    fn normalize_hand_example() {
        let mut rng = seeded(3);
        let w = normalize_weights(&[1.0, 2.0, 3.0], &mut rng).unwrap();
        assert_eq!(w[0], 0.5);
        assert!((0.9..=1.0).contains(&w[1]) && (0.9..=1.0).contains(&w[2]));
        assert!(normalize_weights(&[0.0, 0.0], &mut rng).is_err());
    }

    #[test]
    fn two_free_nodes_mean_shift() {
        let p = assign_powers(2, &[], 11).unwrap();
        assert_eq!(p[0] + p[1], 0.0);
        assert_eq!(p[0], -p[1]);
    }

    #[test]
    fn stations_are_untouched() {
        let stations = [(0, 500.0), (3, -120.5)];
        let p = assign_powers(6, &stations, 4).unwrap();
        assert_eq!(p[0], 500.0);
        assert_eq!(p[3], -120.5);
        assert!(p.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn synthetic_grid_is_connected_and_valid() {
        let a = synthetic_power_grid(&GridSpec::new(16, 8), 5).unwrap();
        a.validate_undirected().unwrap();
        assert_eq!(a.undirected_edges().len(), 15 + 8);
        let mut seen = vec![false; 16];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..16 {
                if a.get(i, j) > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
