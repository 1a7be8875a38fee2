use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::{gaussian_kde, linspace, mass_between, mode_index, scott_bandwidth};
use crate::error::{invalid, Error, Result};
use crate::graphs::AdjacencyMatrix;

/// Smallest kernel bandwidth used for edge marginals.
pub const BANDWIDTH_FLOOR: f64 = 1e-3;

/// One network estimate taken during training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub iteration: u64,
    /// Data misfit `‖T̂ − T‖₂` of the batch that produced the estimate.
    pub loss: f64,
    /// Row-major `rows × cols` weights.
    pub network: Vec<f64>,
}

/// Metadata written ahead of the sample table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleHeader {
    pub rows: usize,
    pub cols: usize,
    pub weight_power: f64,
    /// Inverse temperature `λ` in the weight `exp(−λ · loss^p)`.
    #[serde(default = "unit_scale")]
    pub likelihood_scale: f64,
    pub burn_in: f64,
    #[serde(default)]
    pub meta: serde_json::Value,
}

fn unit_scale() -> f64 {
    1.0
}

/// Network estimates in training order, weighted by `exp(−λ · loss^p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleEnsemble {
    header: EnsembleHeader,
    samples: Vec<Sample>,
}

impl SampleEnsemble {
    pub fn new(rows: usize, cols: usize, weight_power: f64, burn_in: f64) -> Result<Self> {
        if !(weight_power > 0.0 && weight_power.is_finite()) {
            return invalid(format!("weight power must be positive, got {weight_power}"));
        }
        if !(0.0..1.0).contains(&burn_in) {
            return invalid(format!("burn-in fraction must lie in [0, 1), got {burn_in}"));
        }
        Ok(Self {
            header: EnsembleHeader {
                rows,
                cols,
                weight_power,
                likelihood_scale: 1.0,
                burn_in,
                meta: serde_json::Value::Null,
            },
            samples: Vec::new(),
        })
    }

    /// Sets `λ`. Large values concentrate the weights on the best-fitting
    /// samples, the appropriate regime for noiseless data.
    pub fn with_likelihood_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("likelihood scale must be positive, got {scale}"));
        }
        self.header.likelihood_scale = scale;
        Ok(self)
    }

    /// Joins independent chains on the same data into one ensemble. Each
    /// chain drops its own burn-in; the survivors are renumbered in chain
    /// order and the result has no further burn-in.
    pub fn pool(chains: &[SampleEnsemble]) -> Result<Self> {
        let first = chains
            .first()
            .ok_or_else(|| Error::EmptyEnsemble("no chains to pool".into()))?;
        let h = &first.header;
        let mut out = Self::new(h.rows, h.cols, h.weight_power, 0.0)?.with_likelihood_scale(h.likelihood_scale)?;
        for (k, chain) in chains.iter().enumerate() {
            let c = &chain.header;
            if (c.rows, c.cols, c.weight_power, c.likelihood_scale)
                != (h.rows, h.cols, h.weight_power, h.likelihood_scale)
            {
                return invalid(format!("chain {k} does not match the shape and weighting of chain 0"));
            }
            for s in chain.post_burn_in() {
                out.samples.push(Sample {
                    iteration: out.samples.len() as u64,
                    loss: s.loss,
                    network: s.network.clone(),
                });
            }
        }
        out.header.meta = serde_json::json!({ "pooled_chains": chains.len() });
        Ok(out)
    }

    pub fn header(&self) -> &EnsembleHeader {
        &self.header
    }

    pub fn set_meta(&mut self, meta: serde_json::Value) {
        self.header.meta = meta;
    }

    pub fn rows(&self) -> usize {
        self.header.rows
    }

    pub fn cols(&self) -> usize {
        self.header.cols
    }

    pub fn push(&mut self, sample: Sample) -> Result<()> {
        if sample.network.len() != self.rows() * self.cols() {
            return invalid(format!(
                "sample has {} weights, ensemble holds {}x{}",
                sample.network.len(),
                self.rows(),
                self.cols()
            ));
        }
        if !sample.loss.is_finite() || sample.loss < 0.0 {
            return invalid(format!("sample loss must be finite and nonnegative, got {}", sample.loss));
        }
        if let Some(last) = self.samples.last() {
            if sample.iteration <= last.iteration {
                return invalid("samples must be appended in training order");
            }
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Samples left after discarding the burn-in fraction.
    pub fn post_burn_in(&self) -> &[Sample] {
        let skip = (self.header.burn_in * self.samples.len() as f64).floor() as usize;
        &self.samples[skip.min(self.samples.len())..]
    }

    /// Normalized weights `exp(−λ · loss^p)` over `samples`. Energies are
    /// shifted by their minimum first, which leaves the normalized weights
    /// unchanged but avoids underflow.
    pub fn weights_of(&self, samples: &[Sample]) -> Vec<f64> {
        let (p, scale) = (self.header.weight_power, self.header.likelihood_scale);
        let energy: Vec<f64> = samples.iter().map(|s| scale * s.loss.powf(p)).collect();
        let min = energy.iter().cloned().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = energy.iter().map(|e| (-(e - min)).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights_of(&self.samples)
    }

    fn nonempty_post_burn_in(&self) -> Result<&[Sample]> {
        let post = self.post_burn_in();
        if post.is_empty() {
            return Err(Error::EmptyEnsemble(format!(
                "no samples remain after discarding {:.0}% burn-in from {}",
                100.0 * self.header.burn_in,
                self.samples.len()
            )));
        }
        Ok(post)
    }

    /// Minimal-loss sample over the whole chain; earliest wins ties.
    pub fn mle(&self) -> Result<&Sample> {
        self.samples
            .iter()
            .fold(None, |best: Option<&Sample>, s| match best {
                Some(b) if b.loss <= s.loss => Some(b),
                _ => Some(s),
            })
            .ok_or_else(|| Error::EmptyEnsemble("no samples to select a best estimate from".into()))
    }

    pub fn mle_network(&self) -> Result<AdjacencyMatrix> {
        AdjacencyMatrix::new(self.rows(), self.cols(), self.mle()?.network.clone())
    }

    /// Weighted mean of the post-burn-in samples.
    pub fn mean_network(&self) -> Result<AdjacencyMatrix> {
        let post = self.nonempty_post_burn_in()?;
        let w = self.weights_of(post);
        let mut mean = vec![0.0; self.rows() * self.cols()];
        for (s, wk) in post.iter().zip(&w) {
            for (m, x) in mean.iter_mut().zip(&s.network) {
                *m += wk * x;
            }
        }
        AdjacencyMatrix::new(self.rows(), self.cols(), mean)
    }

    /// Post-burn-in values of one entry with their normalized weights.
    pub fn edge_values(&self, edge: (usize, usize)) -> Result<(Vec<f64>, Vec<f64>)> {
        let (i, j) = edge;
        if i >= self.rows() || j >= self.cols() {
            return invalid(format!("edge ({i}, {j}) outside {}x{}", self.rows(), self.cols()));
        }
        let post = self.nonempty_post_burn_in()?;
        let k = i * self.cols() + j;
        Ok((post.iter().map(|s| s.network[k]).collect(), self.weights_of(post)))
    }

    /// Writes `# {header json}` then `iteration,loss,a_00,…` rows.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# {}", serde_json::to_string(&self.header)?)?;
        let mut w = csv::Writer::from_writer(out);
        let mut cols = vec!["iteration".to_string(), "loss".to_string()];
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                cols.push(format!("a_{i}_{j}"));
            }
        }
        w.write_record(&cols)?;
        for s in &self.samples {
            let mut row = vec![s.iteration.to_string(), s.loss.to_string()];
            row.extend(s.network.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = path.display().to_string();
        let first = std::io::BufReader::new(std::fs::File::open(path)?)
            .lines()
            .next()
            .transpose()?
            .unwrap_or_default();
        let json = first.strip_prefix("# ").ok_or_else(|| Error::Parse {
            file: file.clone(),
            line: 1,
            reason: "missing `# {header}` line".into(),
        })?;
        let header: EnsembleHeader = serde_json::from_str(json).map_err(|e| Error::Parse {
            file: file.clone(),
            line: 1,
            reason: e.to_string(),
        })?;
        let mut ens = Self::new(header.rows, header.cols, header.weight_power, header.burn_in)?
            .with_likelihood_scale(header.likelihood_scale)
            .map_err(|e| Error::Parse {
                file: file.clone(),
                line: 1,
                reason: e.to_string(),
            })?;
        ens.header.meta = header.meta;
        for (line, values) in crate::graphs::io::read_numeric_rows(path, true)? {
            let bad = |reason: String| Error::Parse {
                file: file.clone(),
                line: line as usize,
                reason,
            };
            if values.len() != 2 + ens.rows() * ens.cols() {
                return Err(bad(format!("expected {} columns, got {}", 2 + ens.rows() * ens.cols(), values.len())));
            }
            let sample = Sample {
                iteration: values[0] as u64,
                loss: values[1],
                network: values[2..].to_vec(),
            };
            ens.push(sample).map_err(|e| bad(e.to_string()))?;
        }
        Ok(ens)
    }
}

/// Smoothed marginal density of one edge weight on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pub edge: (usize, usize),
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl Marginal {
    pub fn mode(&self) -> f64 {
        self.grid[mode_index(&self.density)]
    }
}

/// Weighted Gaussian KDE of one edge over the post-burn-in samples.
/// `bandwidth = None` applies Scott's rule with a floor of
/// [`BANDWIDTH_FLOOR`].
pub fn marginal_density(
    ensemble: &SampleEnsemble,
    edge: (usize, usize),
    grid_size: usize,
    bandwidth: Option<f64>,
) -> Result<Marginal> {
    let (values, weights) = ensemble.edge_values(edge)?;
    let h = bandwidth.unwrap_or_else(|| scott_bandwidth(&values, Some(&weights), BANDWIDTH_FLOOR));
    let grid = linspace(0.0, 1.0, grid_size);
    let density = gaussian_kde(&values, Some(&weights), &grid, h)?;
    Ok(Marginal {
        edge,
        grid,
        density,
        bandwidth: h,
    })
}

/// Tail mass of the marginal at or beyond `a0`, on the side of `a0` away
/// from the mode. When `a0` sits on the mode the larger side is reported.
pub fn edge_p_value(marginal: &Marginal, a0: f64) -> f64 {
    let (g, d) = (&marginal.grid, &marginal.density);
    let (lo, hi) = (g[0], g[g.len() - 1]);
    let mode = marginal.mode();
    let p = if a0 > mode {
        mass_between(g, d, a0, hi)
    } else if a0 < mode {
        mass_between(g, d, lo, a0)
    } else {
        mass_between(g, d, lo, mode).max(mass_between(g, d, mode, hi))
    };
    p.clamp(0.0, 1.0)
}
