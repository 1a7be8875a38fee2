use serde::{Deserialize, Serialize};

use crate::density::{gaussian_kde, linspace, scott_bandwidth};
use crate::error::{invalid, shape_err, Result};

/// Per-node network statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `k_i = Σ_j a_ij`.
    Degree,
    /// `Σ_i a_ij`: destination totals of a bipartite network. Useful once
    /// rows are normalized, when every row degree is one.
    InDegree,
    /// `½ Σ_jk a_ij a_jk a_ki`.
    Triangle,
}

/// Sum of absolute entrywise differences.
pub fn l1_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return shape_err("l1_error", format!("{} vs {} entries", estimate.len(), truth.len()));
    }
    Ok(estimate.iter().zip(truth).map(|(a, b)| (a - b).abs()).sum())
}

/// Row sums of a row-major `rows × cols` matrix.
pub fn degrees(weights: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    weights.chunks(cols).take(rows).map(|r| r.iter().sum()).collect()
}

/// Column sums of a row-major `rows × cols` matrix.
pub fn in_degrees(weights: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..cols).map(|j| (0..rows).map(|i| weights[i * cols + j]).sum()).collect()
}

/// Weighted triangles per node, `½ Σ_jk a_ij a_jk a_ki`, i.e. half the
/// diagonal of `A³`.
pub fn triangles(weights: &[f64], n: usize) -> Vec<f64> {
    let a = |i: usize, j: usize| weights[i * n + j];
    // A² once, then each diagonal entry of A³ is a row-column dot product
    let mut a2 = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a(i, k);
            if aik != 0.0 {
                for j in 0..n {
                    a2[i * n + j] += aik * a(k, j);
                }
            }
        }
    }
    (0..n)
        .map(|i| 0.5 * (0..n).map(|k| a2[i * n + k] * a(k, i)).sum::<f64>())
        .collect()
}

/// Evaluates a statistic on a row-major `rows × cols` matrix.
pub fn statistic(kind: Statistic, weights: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    if weights.len() != rows * cols {
        return shape_err("statistic", format!("{} weights for {rows}x{cols}", weights.len()));
    }
    match kind {
        Statistic::Degree => Ok(degrees(weights, rows, cols)),
        Statistic::InDegree => Ok(in_degrees(weights, rows, cols)),
        Statistic::Triangle if rows == cols => Ok(triangles(weights, rows)),
        Statistic::Triangle => invalid(format!("triangles need a square network, got {rows}x{cols}")),
    }
}

/// A density over statistic values, optionally with a pointwise band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEstimate {
    pub kind: Statistic,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub band: Option<Vec<f64>>,
    pub bandwidth: f64,
    /// Set when the band could not carry information (a single sample).
    #[serde(default)]
    pub degenerate: bool,
}

/// Default grid: 100 points on `[0, 1.1 · max]`, or `[0, 1]` when every
/// value is zero.
pub fn default_grid(values: &[f64]) -> Vec<f64> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    let hi = if max > 0.0 { 1.1 * max } else { 1.0 };
    linspace(0.0, hi, 100)
}

/// Scott's rule over `values`, never narrower than one grid step so the
/// kernel is resolved on the grid.
pub fn default_bandwidth(values: &[f64], grid: &[f64]) -> f64 {
    let step = if grid.len() > 1 { grid[1] - grid[0] } else { 1e-3 };
    scott_bandwidth(values, None, step.max(1e-3))
}

/// Kernel density of the per-node statistic of one network.
pub fn distribution(
    kind: Statistic,
    weights: &[f64],
    rows: usize,
    cols: usize,
    grid: Option<&[f64]>,
    bandwidth: Option<f64>,
) -> Result<DistributionEstimate> {
    let values = statistic(kind, weights, rows, cols)?;
    let grid = grid.map_or_else(|| default_grid(&values), <[f64]>::to_vec);
    let h = bandwidth.unwrap_or_else(|| default_bandwidth(&values, &grid));
    let density = gaussian_kde(&values, None, &grid, h)?;
    Ok(DistributionEstimate {
        kind,
        grid,
        density,
        band: None,
        bandwidth: h,
        degenerate: false,
    })
}

/// Spearman rank correlation, averaging the ranks of ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return invalid("spearman needs two equally long samples of at least two values");
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = (x.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return invalid("spearman is undefined for a constant sample");
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
            end += 1;
        }
        let r = (k + end) as f64 / 2.0 + 1.0;
        for &i in &idx[k..=end] {
            out[i] = r;
        }
        k = end + 1;
    }
    out
}
