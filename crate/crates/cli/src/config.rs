//! Run configuration: one TOML file describing the model, the ground-truth
//! network, the data, the estimator and optional sweep axes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use netinfer::analysis::Statistic;
use netinfer::dynamics::{HarrisWilsonParams, HwDataSpec, KuramotoParams, Order, PowerCutSpec};
use netinfer::inference::TrainingConfig;
use netinfer::nn::MlpConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Kuramoto1,
    Kuramoto2,
    HarrisWilson,
}

impl ModelKind {
    pub fn order(self) -> Option<Order> {
        match self {
            ModelKind::Kuramoto1 => Some(Order::First),
            ModelKind::Kuramoto2 => Some(Order::Second),
            ModelKind::HarrisWilson => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFormat {
    #[default]
    Dense,
    EdgeList,
}

/// Where the ground-truth network comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSource {
    Random {
        n: usize,
        #[serde(default = "half")]
        density: f64,
        #[serde(default = "unit_range")]
        weight_range: (f64, f64),
    },
    Complete {
        n: usize,
    },
    /// A connected synthetic transmission grid.
    PowerGrid {
        n: usize,
        #[serde(default)]
        extra_edges: usize,
    },
    /// Cost network built from random origin-destination distances.
    HwCost {
        origins: usize,
        destinations: usize,
        #[serde(default = "distance_range")]
        distance_range: (f64, f64),
    },
    File {
        path: PathBuf,
        #[serde(default)]
        format: MatrixFormat,
    },
}

fn half() -> f64 {
    0.5
}

fn unit_range() -> (f64, f64) {
    (0.0, 1.0)
}

fn distance_range() -> (f64, f64) {
    (0.1, 1.0)
}

/// Cutting loaded lines of an equilibrated grid and recording the
/// transient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerCutConfig {
    pub cuts: usize,
    #[serde(flatten)]
    pub spec: PowerCutSpec,
    /// Scale of balanced random power injections used when `omega` is
    /// empty.
    #[serde(default)]
    pub power_scale: Option<f64>,
}

/// Random windows drawn from the generated series before training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsampleConfig {
    pub windows: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default = "one")]
    pub n_segments: usize,
    #[serde(default = "two")]
    pub segment_len: usize,
    /// Noise level; replaces the `sigma` of the dynamics when set.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub origin_sigma: Option<f64>,
    #[serde(default)]
    pub size_range: Option<(f64, f64)>,
    #[serde(default)]
    pub power_cut: Option<PowerCutConfig>,
    #[serde(default)]
    pub subsample: Option<SubsampleConfig>,
}

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            n_segments: 1,
            segment_len: 2,
            sigma: None,
            origin_sigma: None,
            size_range: None,
            power_cut: None,
            subsample: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Edges whose marginal densities and p-values are written.
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    #[serde(default = "default_statistics")]
    pub statistics: Vec<Statistic>,
    #[serde(default = "default_grid_size")]
    pub marginal_grid: usize,
}

fn default_statistics() -> Vec<Statistic> {
    vec![Statistic::Degree, Statistic::Triangle]
}

fn default_grid_size() -> usize {
    200
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            edges: Vec::new(),
            statistics: default_statistics(),
            marginal_grid: default_grid_size(),
        }
    }
}

/// Everything needed to reproduce one run. `seed` drives the network, the
/// data and training alike.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub kuramoto: Option<KuramotoParams>,
    #[serde(default)]
    pub harris_wilson: Option<HarrisWilsonParams>,
    pub network: NetworkSource,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub mlp: Option<MlpConfig>,
    #[serde(default)]
    pub training: Option<TrainingConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    /// Dotted parameter path to the values it takes in a sweep.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sweep: BTreeMap<String, Vec<toml::Value>>,
}

impl RunConfig {
    pub fn from_value(value: toml::Value) -> Result<Self> {
        let config: Self = value.try_into().context("invalid run configuration")?;
        Ok(config)
    }

    /// The file as a raw TOML tree, kept for sweeps.
    pub fn read_value(path: &Path) -> Result<toml::Value> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("{} is not valid TOML", path.display()))
    }

    /// Kuramoto dynamics with the data noise level applied.
    pub fn kuramoto_params(&self) -> Result<KuramotoParams> {
        let mut p = self
            .kuramoto
            .clone()
            .ok_or_else(|| anyhow!("model {:?} needs a [kuramoto] table", self.model))?;
        if let Some(sigma) = self.data.sigma {
            p.sigma = sigma;
        }
        Ok(p)
    }

    pub fn hw_params(&self) -> Result<HarrisWilsonParams> {
        let mut p = self
            .harris_wilson
            .clone()
            .ok_or_else(|| anyhow!("model harris_wilson needs a [harris_wilson] table"))?;
        if let Some(sigma) = self.data.sigma {
            p.sigma = sigma;
        }
        Ok(p)
    }

    pub fn hw_data_spec(&self) -> HwDataSpec {
        HwDataSpec {
            n_segments: self.data.n_segments,
            segment_len: self.data.segment_len,
            origin_sigma: self.data.origin_sigma.unwrap_or(0.1),
            size_range: self.data.size_range.unwrap_or((0.1, 1.0)),
        }
    }

    pub fn mlp_config(&self) -> MlpConfig {
        self.mlp.clone().unwrap_or_else(|| match self.model {
            ModelKind::HarrisWilson => MlpConfig::harris_wilson_default(),
            _ => MlpConfig::kuramoto_default(),
        })
    }

    /// Training settings, seeded from the run seed.
    pub fn training_config(&self) -> TrainingConfig {
        let mut t = self.training.clone().unwrap_or_else(|| TrainingConfig::new(1, 100, 0));
        t.seed = self.seed;
        t
    }

    /// Output directory, from the command line or the file.
    pub fn out_dir(&self, flag: Option<&Path>) -> Result<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.out.clone())
            .ok_or_else(|| anyhow!("no output directory: pass --out or set `out` in the config"))
    }

    /// Checks everything that can be checked before any work starts.
    pub fn validate(&self) -> Result<()> {
        match self.model.order() {
            Some(order) => {
                let p = self.kuramoto_params()?;
                let n = match &self.network {
                    NetworkSource::Random { n, .. } | NetworkSource::Complete { n } | NetworkSource::PowerGrid { n, .. } => {
                        Some(*n)
                    }
                    NetworkSource::HwCost { .. } => bail!("a Kuramoto model needs a square network, not hw_cost"),
                    NetworkSource::File { .. } => None,
                };
                // an empty omega means zero frequencies, valid for any size
                let check = p.validate(order, n.unwrap_or(p.omega.len()));
                check.map_err(|e| anyhow!("[kuramoto]: {e}"))?;
                if self.data.power_cut.is_some() && order != Order::Second {
                    bail!("power cuts need the second-order model kuramoto2");
                }
            }
            None => {
                self.hw_params()?.validate().map_err(|e| anyhow!("[harris_wilson]: {e}"))?;
                if matches!(self.network, NetworkSource::Random { .. } | NetworkSource::Complete { .. } | NetworkSource::PowerGrid { .. }) {
                    bail!("harris_wilson needs an hw_cost or file network");
                }
                if self.data.power_cut.is_some() {
                    bail!("power cuts apply to Kuramoto grids only");
                }
            }
        }
        if let NetworkSource::File { path, .. } = &self.network {
            if !path.is_file() {
                bail!("network file {} does not exist", path.display());
            }
        }
        if self.data.n_segments == 0 || self.data.segment_len < 2 {
            bail!("data needs at least one segment of two states");
        }
        if let Some(s) = &self.data.subsample {
            if s.windows == 0 || s.len < 2 {
                bail!("subsample needs at least one window of two states");
            }
        }
        if self.analysis.marginal_grid < 2 {
            bail!("analysis.marginal_grid must be at least 2");
        }
        self.mlp_config()
            .validate_for_adjacency()
            .map_err(|e| anyhow!("[mlp]: {e}"))?;
        let training = self.training_config();
        training.validate().map_err(|e| anyhow!("[training]: {e}"))?;
        let states = match (&self.data.power_cut, &self.data.subsample) {
            (Some(cut), _) => cut.spec.window_len,
            (None, Some(s)) => s.len,
            (None, None) => self.data.segment_len,
        };
        if training.batch_size > states - 1 {
            bail!(
                "[training]: batch_size {} exceeds the {} steps in each segment",
                training.batch_size,
                states - 1
            );
        }
        for (axis, values) in &self.sweep {
            if values.is_empty() {
                bail!("sweep axis `{axis}` has no values");
            }
        }
        Ok(())
    }
}

/// Sets `path` (dot separated) in a TOML tree, creating tables as needed.
pub fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys.pop().filter(|k| !k.is_empty()).ok_or_else(|| anyhow!("empty sweep axis name"))?;
    let mut node = root;
    for key in keys {
        let table = node
            .as_table_mut()
            .ok_or_else(|| anyhow!("sweep axis `{path}`: `{key}` is not inside a table"))?;
        node = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| anyhow!("sweep axis `{path}` does not point into a table"))?
        .insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const KURAMOTO: &str = r#"
        model = "kuramoto1"
        seed = 3
        [kuramoto]
        beta = 1.0
        kappa = 1.0
        dt = 0.1
        [network]
        source = "random"
        n = 5
        [data]
        n_segments = 4
        [sweep]
        "data.sigma" = [0.0, 0.01]
        seed = [1, 2, 3]
    "#;

    #[test]
    fn parses_and_validates() {
        let c = RunConfig::from_value(toml::from_str(KURAMOTO).unwrap()).unwrap();
        assert_eq!(c.model, ModelKind::Kuramoto1);
        assert_eq!(c.data.n_segments, 4);
        assert_eq!(c.sweep.len(), 2);
        assert_eq!(c.training_config().seed, 3);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = KURAMOTO.replace("n_segments", "segments");
        assert!(RunConfig::from_value(toml::from_str(&bad).unwrap()).is_err());
    }

    #[test]
    fn dotted_paths_create_tables() {
        let mut v: toml::Value = toml::from_str(KURAMOTO).unwrap();
        set_path(&mut v, "training.epochs", toml::Value::Integer(7)).unwrap();
        set_path(&mut v, "data.sigma", toml::Value::Float(0.5)).unwrap();
        let c = RunConfig::from_value(v).unwrap();
        assert_eq!(c.training.as_ref().unwrap().epochs, 7);
        assert_eq!(c.kuramoto_params().unwrap().sigma, 0.5);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::from_value(toml::from_str(KURAMOTO).unwrap()).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_value(toml::from_str(&text).unwrap()).unwrap(), c);
    }

    #[test]
    fn power_cuts_need_inertia() {
        let text = KURAMOTO.replace(
            "[sweep]",
            "[data.power_cut]\ncuts = 2\nwindow_len = 7\nrecord_delay = 1.0\nmax_equilibration_steps = 1000\ntolerance = 0.01\n[sweep]",
        );
        let c = RunConfig::from_value(toml::from_str(&text).unwrap()).unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("kuramoto2"));
    }
}
