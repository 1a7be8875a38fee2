use rand::Rng as _;

use super::AdjacencyMatrix;
use crate::error::{invalid, Result};
use crate::rng::stream;

/// Erdős–Rényi style undirected graph: each pair is an edge with
/// probability `density`, weighted uniformly on `weight_range`.
pub fn random_graph(n: usize, density: f64, weight_range: (f64, f64), seed: u64) -> Result<AdjacencyMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return invalid(format!("density must lie in (0, 1], got {density}"));
    }
    let (lo, hi) = weight_range;
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return invalid(format!("weight range [{lo}, {hi}] must lie inside [0, 1]"));
    }
    let mut rng = stream(seed, "random_graph");
    let mut a = AdjacencyMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let w = if hi > lo { rng.random_range(lo..=hi) } else { lo };
                a.set_symmetric(i, j, w)?;
            }
        }
    }
    Ok(a)
}
