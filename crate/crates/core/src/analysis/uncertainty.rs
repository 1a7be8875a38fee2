use serde::{Deserialize, Serialize};

use super::stats::{default_bandwidth, default_grid, statistic, DistributionEstimate, Statistic};
use crate::density::{gaussian_kde, trapezoid};
use crate::error::{shape_err, Result};
use crate::inference::SampleEnsemble;

/// Floor applied to densities before taking logarithms.
pub const KL_FLOOR: f64 = 1e-12;

fn check_grid(p: &[f64], q: &[f64], grid: &[f64]) -> Result<()> {
    if p.len() != grid.len() || q.len() != grid.len() {
        return shape_err(
            "density_distance",
            format!("densities of {} and {} points on a {}-point grid", p.len(), q.len(), grid.len()),
        );
    }
    Ok(())
}

/// `∫ (√p − √q)²` by the trapezoid rule.
pub fn hellinger_distance(p: &[f64], q: &[f64], grid: &[f64]) -> Result<f64> {
    check_grid(p, q, grid)?;
    let f: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).collect();
    Ok(trapezoid(grid, &f))
}

fn kl_pointwise(p: f64, q: f64) -> f64 {
    let (p, q) = (p.max(KL_FLOOR), q.max(KL_FLOOR));
    p * (p / q).ln()
}

/// `∫ p log(p/q)` with both densities floored at [`KL_FLOOR`].
pub fn kl_divergence(p: &[f64], q: &[f64], grid: &[f64]) -> Result<f64> {
    check_grid(p, q, grid)?;
    let f: Vec<f64> = p.iter().zip(q).map(|(&a, &b)| kl_pointwise(a, b)).collect();
    Ok(trapezoid(grid, &f))
}

/// Statistic densities of the best estimate and of every post-burn-in
/// sample, on a shared grid and bandwidth.
struct SampleDensities {
    grid: Vec<f64>,
    bandwidth: f64,
    mle: Vec<f64>,
    samples: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn sample_densities(
    ensemble: &SampleEnsemble,
    kind: Statistic,
    grid: Option<&[f64]>,
    bandwidth: Option<f64>,
) -> Result<SampleDensities> {
    let (rows, cols) = (ensemble.rows(), ensemble.cols());
    let mle_stats = statistic(kind, &ensemble.mle()?.network, rows, cols)?;
    let (_, weights) = ensemble.edge_values((0, 0))?;
    let post = ensemble.post_burn_in();
    let sample_stats = post
        .iter()
        .map(|s| statistic(kind, &s.network, rows, cols))
        .collect::<Result<Vec<_>>>()?;
    let grid = match grid {
        Some(g) => g.to_vec(),
        None => {
            let all: Vec<f64> = mle_stats.iter().chain(sample_stats.iter().flatten()).copied().collect();
            default_grid(&all)
        }
    };
    let h = bandwidth.unwrap_or_else(|| default_bandwidth(&mle_stats, &grid));
    let mle = gaussian_kde(&mle_stats, None, &grid, h)?;
    let samples = sample_stats
        .iter()
        .map(|v| gaussian_kde(v, None, &grid, h))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleDensities {
        grid,
        bandwidth: h,
        mle,
        samples,
        weights,
    })
}

/// Density of the statistic on the best estimate, with the pointwise band
/// `Σ_j w_j (√ρ̂(k) − √ρ_j(k))²` over post-burn-in samples `j`.
pub fn hellinger_uncertainty(
    ensemble: &SampleEnsemble,
    kind: Statistic,
    grid: Option<&[f64]>,
    bandwidth: Option<f64>,
) -> Result<DistributionEstimate> {
    let sd = sample_densities(ensemble, kind, grid, bandwidth)?;
    let mut band = vec![0.0; sd.grid.len()];
    for (rho, w) in sd.samples.iter().zip(&sd.weights) {
        for ((b, r), m) in band.iter_mut().zip(rho).zip(&sd.mle) {
            *b += w * (m.sqrt() - r.sqrt()).powi(2);
        }
    }
    Ok(DistributionEstimate {
        kind,
        degenerate: sd.samples.len() < 2,
        grid: sd.grid,
        density: sd.mle,
        band: Some(band),
        bandwidth: sd.bandwidth,
    })
}

/// Pointwise relative entropy profile `Σ_j w_j ρ_j log(ρ_j / ρ̂)` and its
/// integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlProfile {
    pub kind: Statistic,
    pub grid: Vec<f64>,
    pub profile: Vec<f64>,
    pub total: f64,
}

pub fn kl_uncertainty(
    ensemble: &SampleEnsemble,
    kind: Statistic,
    grid: Option<&[f64]>,
    bandwidth: Option<f64>,
) -> Result<KlProfile> {
    let sd = sample_densities(ensemble, kind, grid, bandwidth)?;
    let mut profile = vec![0.0; sd.grid.len()];
    for (rho, w) in sd.samples.iter().zip(&sd.weights) {
        for ((p, r), m) in profile.iter_mut().zip(rho).zip(&sd.mle) {
            *p += w * kl_pointwise(*r, *m);
        }
    }
    let total = trapezoid(&sd.grid, &profile);
    Ok(KlProfile {
        kind,
        grid: sd.grid,
        profile,
        total,
    })
}

/// Integral of an estimate's band over its grid (zero without a band).
pub fn integrated_band(estimate: &DistributionEstimate) -> f64 {
    estimate
        .band
        .as_ref()
        .map_or(0.0, |b| trapezoid(&estimate.grid, b))
}
