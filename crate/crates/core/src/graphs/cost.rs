use super::AdjacencyMatrix;
use crate::error::{invalid, shape_err, Result};

/// Cost network `c_ij = exp(-d_ij / τ)` with `τ = max d_ij`. With several
/// transport modes the elementwise minimum distance is used.
pub fn hw_cost_network(modes: &[AdjacencyMatrix]) -> Result<AdjacencyMatrix> {
    let first = match modes.first() {
        Some(m) => m,
        None => return invalid("no distance matrix given"),
    };
    let (rows, cols) = (first.rows(), first.cols());
    let mut d = first.weights().to_vec();
    for m in &modes[1..] {
        if (m.rows(), m.cols()) != (rows, cols) {
            return shape_err(
                "hw_cost_network",
                format!("mode matrices {rows}x{cols} and {}x{}", m.rows(), m.cols()),
            );
        }
        for (x, &y) in d.iter_mut().zip(m.weights()) {
            *x = x.min(y);
        }
    }
    let tau = d.iter().cloned().fold(0.0, f64::max);
    if tau <= 0.0 {
        return invalid("all distances are zero, so the cost scale is undefined");
    }
    AdjacencyMatrix::new(rows, cols, d.into_iter().map(|x| (-x / tau).exp()).collect())
}
