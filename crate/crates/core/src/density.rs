//! Weighted Gaussian kernel density estimates on fixed grids.

use crate::error::{invalid, Result};

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| lo + step * i as f64).collect()
        }
    }
}

/// Trapezoid-rule integral of `values` sampled on `grid`.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Weights normalized to sum to one; `None` means uniform.
pub fn normalized_weights(n: usize, weights: Option<&[f64]>) -> Vec<f64> {
    match weights {
        Some(w) => {
            let total: f64 = w.iter().sum();
            w.iter().map(|x| x / total).collect()
        }
        None => vec![1.0 / n as f64; n],
    }
}

/// Weighted mean and standard deviation.
pub fn weighted_moments(values: &[f64], weights: &[f64]) -> (f64, f64) {
    let mean: f64 = values.iter().zip(weights).map(|(x, w)| x * w).sum();
    let var: f64 = values
        .iter()
        .zip(weights)
        .map(|(x, w)| w * (x - mean) * (x - mean))
        .sum();
    (mean, var.max(0.0).sqrt())
}

/// Scott's rule `σ · n_eff^(-1/5)` over a weighted sample, with
/// `n_eff = 1 / Σ w²`. Never returns less than `floor`.
pub fn scott_bandwidth(values: &[f64], weights: Option<&[f64]>, floor: f64) -> f64 {
    if values.is_empty() {
        return floor;
    }
    let w = normalized_weights(values.len(), weights);
    let (_, sd) = weighted_moments(values, &w);
    let n_eff = 1.0 / w.iter().map(|x| x * x).sum::<f64>();
    (sd * n_eff.powf(-0.2)).max(floor)
}

/// Weighted Gaussian KDE evaluated on `grid` and renormalized so that its
/// trapezoid integral over the grid is exactly one.
pub fn gaussian_kde(
    values: &[f64],
    weights: Option<&[f64]>,
    grid: &[f64],
    bandwidth: f64,
) -> Result<Vec<f64>> {
    if values.is_empty() {
        return invalid("kernel density of an empty sample");
    }
    if !(bandwidth > 0.0) {
        return invalid(format!("bandwidth must be positive, got {bandwidth}"));
    }
    if grid.len() < 2 {
        return invalid("density grid needs at least two points");
    }
    let w = normalized_weights(values.len(), weights);
    let mut density: Vec<f64> = grid
        .iter()
        .map(|&g| {
            values
                .iter()
                .zip(&w)
                .map(|(&x, &wi)| {
                    let u = (g - x) / bandwidth;
                    wi * (-0.5 * u * u).exp()
                })
                .sum()
        })
        .collect();
    let mass = trapezoid(grid, &density);
    if !(mass > 0.0) || !mass.is_finite() {
        return invalid("kernel density has no mass on the grid");
    }
    density.iter_mut().for_each(|d| *d /= mass);
    Ok(density)
}

/// Index of the largest density value; first one on ties.
pub fn mode_index(density: &[f64]) -> usize {
    density
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        })
        .0
}

/// Trapezoid mass of the density on `[lo, hi]`, interpolating linearly at
/// the interval ends.
pub fn mass_between(grid: &[f64], density: &[f64], lo: f64, hi: f64) -> f64 {
    let lo = lo.max(grid[0]);
    let hi = hi.min(grid[grid.len() - 1]);
    if hi <= lo {
        return 0.0;
    }
    let interp = |x: f64| -> f64 {
        let k = grid.partition_point(|&g| g <= x).clamp(1, grid.len() - 1);
        let (x0, x1) = (grid[k - 1], grid[k]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        density[k - 1] + t * (density[k] - density[k - 1])
    };
    let mut xs = vec![lo];
    let mut ys = vec![interp(lo)];
    for (&g, &d) in grid.iter().zip(density) {
        if g > lo && g < hi {
            xs.push(g);
            ys.push(d);
        }
    }
    xs.push(hi);
    ys.push(interp(hi));
    trapezoid(&xs, &ys)
}
