use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{KuramotoParams, Order, TimeSeries};
use crate::error::{invalid, Result};

/// Regression design for one Kuramoto data set: per observation, the phases
/// at which the coupling is evaluated and the coupling force implied by the
/// finite differences.
struct Design {
    n: usize,
    /// Phases at each observation.
    phases: Vec<Vec<f64>>,
    /// `κ Σ_j a_ij sin(φ_j − φ_i)` per observation and node.
    targets: Vec<Vec<f64>>,
}

impl Design {
    /// First order: `β(φ(t+1) − φ(t))/dt − ω`. Second order:
    /// `α(φ(t+1) − 2φ(t) + φ(t−1))/dt² + β(φ(t) − φ(t−1))/dt − ω`,
    /// both evaluated at the phases `φ(t)`.
    fn assemble(data: &TimeSeries, params: &KuramotoParams, order: Order) -> Result<Self> {
        let n = data.n_nodes();
        params.validate(order, n)?;
        data.require_segment_len(order.history() + 1)?;
        let omega = params.omega_for(n)?;
        let dt = params.dt;
        let mut phases = Vec::new();
        let mut targets = Vec::new();
        for seg in data.segments() {
            for t in order.history() - 1..seg.len() - 1 {
                let x: Vec<f64> = (0..n)
                    .map(|i| {
                        let next = seg[t + 1][i];
                        let now = seg[t][i];
                        let force = match order {
                            Order::First => params.beta * (next - now) / dt,
                            Order::Second => {
                                let prev = seg[t - 1][i];
                                params.alpha * (next - 2.0 * now + prev) / (dt * dt)
                                    + params.beta * (now - prev) / dt
                            }
                        };
                        (force - omega[i]) / params.kappa
                    })
                    .collect();
                phases.push(seg[t].clone());
                targets.push(x);
            }
        }
        if params.kappa == 0.0 {
            return invalid("kappa = 0 leaves the network unidentifiable");
        }
        Ok(Self { n, phases, targets })
    }

    /// `G_iᵀ`: one row per observation, one column per node, holding
    /// `sin(φ_j − φ_i)`.
    fn observations(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.phases.len(), self.n, |l, j| {
            let p = &self.phases[l];
            (p[j] - p[i]).sin()
        })
    }
}

/// Rank tolerance `max(rows, cols) · ε · σ_max`.
fn tolerance(shape: (usize, usize), singular: &DVector<f64>) -> f64 {
    let smax = singular.iter().cloned().fold(0.0, f64::max);
    shape.0.max(shape.1) as f64 * f64::EPSILON * smax
}

/// Per-node Gram ranks and the convexity `𝔠 = min_i rank(G_i G_iᵀ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramSummary {
    pub ranks: Vec<usize>,
    pub convexity: usize,
    pub observations: usize,
}

impl GramSummary {
    /// True when every row of the network is pinned down by the data.
    pub fn fully_determined(&self) -> bool {
        self.convexity + 1 == self.ranks.len()
    }
}

/// Computes the Gram ranks of the regression problem behind `data`.
pub fn gram_convexity(data: &TimeSeries, params: &KuramotoParams, order: Order) -> Result<GramSummary> {
    let design = Design::assemble(data, params, order)?;
    let ranks: Vec<usize> = (0..design.n)
        .map(|i| {
            let g = design.observations(i);
            let shape = g.shape();
            let sv = g.singular_values();
            let tol = tolerance(shape, &sv);
            sv.iter().filter(|&&s| s > tol).count()
        })
        .collect();
    Ok(GramSummary {
        convexity: ranks.iter().copied().min().unwrap_or(0),
        observations: design.phases.len(),
        ranks,
    })
}

/// Least-squares network estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub n: usize,
    /// Row-major estimate with zero diagonal; entries may be negative.
    pub weights: Vec<f64>,
    pub ranks: Vec<usize>,
    /// Nodes whose row was underdetermined and got the minimum-norm fit.
    pub rank_deficient: Vec<usize>,
}

impl OlsResult {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }
}

/// Row-by-row least squares `â_i = X_i G_iᵀ (G_i G_iᵀ)⁺`, solved through a
/// truncated SVD with the same tolerance as [`gram_convexity`]. Rows with
/// rank below `N − 1` receive the minimum-norm solution and are listed in
/// `rank_deficient`.
pub fn ols_infer(data: &TimeSeries, params: &KuramotoParams, order: Order) -> Result<OlsResult> {
    let design = Design::assemble(data, params, order)?;
    let n = design.n;
    let mut weights = vec![0.0; n * n];
    let mut ranks = Vec::with_capacity(n);
    let mut rank_deficient = Vec::new();
    for i in 0..n {
        let g = design.observations(i);
        let shape = g.shape();
        let x = DVector::from_iterator(design.targets.len(), design.targets.iter().map(|t| t[i]));
        let svd = g.svd(true, true);
        let tol = tolerance(shape, &svd.singular_values);
        let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
        // σ ≤ tol are treated as zero, which yields the minimum-norm solution
        let row = if rank == 0 {
            DVector::zeros(n)
        } else {
            svd.solve(&x, tol.max(f64::MIN_POSITIVE))
                .map_err(|e| crate::Error::InvalidParameter(format!("least squares failed for node {i}: {e}")))?
        };
        for j in 0..n {
            weights[i * n + j] = if i == j { 0.0 } else { row[j] };
        }
        if rank + 1 < n {
            rank_deficient.push(i);
        }
        ranks.push(rank);
    }
    Ok(OlsResult {
        n,
        weights,
        ranks,
        rank_deficient,
    })
}
