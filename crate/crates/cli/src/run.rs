//! The single-run commands: generate, train, infer-ols and analyze.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use netinfer::analysis::{
    default_bandwidth, default_grid, distribution, gram_convexity, hellinger_distance, hellinger_uncertainty,
    integrated_band, kl_uncertainty, l1_error, ols_infer, statistic, Statistic,
};
use netinfer::dynamics::{
    equilibrate, generate_hw_dataset, generate_kuramoto_dataset, select_loaded_cuts, simulate_power_cut, HwSeries,
    KuramotoParams, TimeSeries,
};
use netinfer::graphs::{assign_powers, hw_cost_network, io, random_graph, synthetic_power_grid, AdjacencyMatrix, GridSpec};
use netinfer::inference::{edge_p_value, marginal_density, Problem, SampleEnsemble};
use rand::Rng as _;
use serde::Serialize;

use crate::config::{MatrixFormat, ModelKind, NetworkSource, RunConfig};
use crate::output::{ensure_dir, field, write_json, write_manifest, write_table};
use crate::{Classify, Common, Failure};

/// Column order of `comparison.csv`, one row per estimation method.
pub const COMPARISON_COLUMNS: [&str; 4] = ["method", "l1_error", "mean_abs_error", "max_abs_error"];

/// Maps library errors to exit classes: bad parameters are configuration
/// errors, everything else is a runtime failure.
fn core<T>(r: netinfer::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        netinfer::Error::InvalidParameter(_) | netinfer::Error::Shape { .. } => Failure::Config(e.into()),
        other => Failure::Runtime(other.into()),
    })
}

/// Reads and validates the configuration named on the command line.
pub fn load(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let mut config = RunConfig::from_value(RunConfig::read_value(&common.config).config()?).config()?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    config.validate().config()?;
    let out = config.out_dir(common.out.as_deref()).config()?;
    Ok((config, out))
}

/// The configuration for `analyze`: given explicitly, or archived next to
/// the data.
pub fn load_for_analysis(path: Option<&Path>, data_dir: &Path) -> Result<Option<RunConfig>, Failure> {
    let archived = data_dir.join("config.toml");
    let path = match path {
        Some(p) => p.to_path_buf(),
        None if archived.is_file() => archived,
        None => return Ok(None),
    };
    let config = RunConfig::from_value(RunConfig::read_value(&path).config()?).config()?;
    Ok(Some(config))
}

pub enum Observations {
    Kuramoto(TimeSeries),
    HarrisWilson(HwSeries),
}

/// Ground truth and observations of one run.
pub struct Generated {
    pub truth: AdjacencyMatrix,
    pub data: Observations,
    /// Lines removed before recording, for power-cut runs.
    pub cuts: Vec<(usize, usize)>,
}

impl Generated {
    /// The network that actually produced the data, in the form the
    /// estimator returns.
    fn reference(&self) -> Result<AdjacencyMatrix, Failure> {
        match self.data {
            Observations::HarrisWilson(_) => core(self.truth.row_normalized()),
            Observations::Kuramoto(_) if self.cuts.is_empty() => Ok(self.truth.clone()),
            Observations::Kuramoto(_) => {
                let mut a = self.truth.clone();
                for &(i, j) in &self.cuts {
                    core(a.set_symmetric(i, j, 0.0))?;
                }
                Ok(a)
            }
        }
    }
}

fn build_network(config: &RunConfig) -> Result<AdjacencyMatrix, Failure> {
    let seed = config.seed;
    match &config.network {
        NetworkSource::Random { n, density, weight_range } => core(random_graph(*n, *density, *weight_range, seed)),
        NetworkSource::Complete { n } => Ok(AdjacencyMatrix::complete(*n)),
        NetworkSource::PowerGrid { n, extra_edges } => core(synthetic_power_grid(&GridSpec::new(*n, *extra_edges), seed)),
        NetworkSource::HwCost { origins, destinations, distance_range: (lo, hi) } => {
            if !(0.0 < *lo && lo < hi) {
                return Err(Failure::Config(anyhow!("distance range [{lo}, {hi}] must be positive and nonempty")));
            }
            let mut rng = netinfer::rng::stream(seed, "hw_distances");
            let d: Vec<f64> = (0..origins * destinations).map(|_| rng.random_range(*lo..*hi)).collect();
            core(hw_cost_network(&[core(AdjacencyMatrix::new(*origins, *destinations, d))?]))
        }
        NetworkSource::File { path, format } => match format {
            MatrixFormat::Dense => io::read_dense(path).runtime(),
            MatrixFormat::EdgeList => io::read_edge_list(path, None).runtime(),
        },
    }
}

/// Kuramoto parameters with balanced random powers filled in when asked.
fn kuramoto_params(config: &RunConfig, n: usize) -> Result<KuramotoParams, Failure> {
    let mut p = config.kuramoto_params().config()?;
    if let Some(scale) = config.data.power_cut.as_ref().and_then(|c| c.power_scale) {
        if p.omega.is_empty() {
            p.omega = core(assign_powers(n, &[], config.seed))?.iter().map(|w| scale * w).collect();
        }
    }
    Ok(p)
}

pub fn generate(config: &RunConfig, out: &Path) -> Result<Generated, Failure> {
    ensure_dir(out).runtime()?;
    let truth = build_network(config)?;
    let seed = config.seed;
    let mut cuts = Vec::new();
    let data = match config.model.order() {
        Some(order) => {
            let p = kuramoto_params(config, truth.rows())?;
            let series = match &config.data.power_cut {
                Some(pc) => {
                    let eq = core(equilibrate(&truth, &p, &pc.spec))?;
                    cuts = core(select_loaded_cuts(&truth, &eq.phases, pc.cuts, seed))?;
                    let record = core(simulate_power_cut(&truth, &cuts, &p, &pc.spec, seed))?;
                    io::write_dense(&out.join("perturbed.csv"), &record.perturbed).runtime()?;
                    let rows = cuts.iter().map(|(i, j)| vec![i.to_string(), j.to_string()]);
                    write_table(&out.join("cuts.csv"), &["i", "j"], rows).runtime()?;
                    record.series
                }
                None => core(generate_kuramoto_dataset(
                    &truth,
                    &p,
                    order,
                    config.data.n_segments,
                    config.data.segment_len,
                    seed,
                ))?,
            };
            series.write_csv(&out.join("series.csv")).runtime()?;
            Observations::Kuramoto(series)
        }
        None => {
            let p = config.hw_params().config()?;
            let data = core(generate_hw_dataset(&truth, &p, &config.hw_data_spec(), seed))?;
            data.destinations.write_csv(&out.join("destinations.csv")).runtime()?;
            data.origins.write_csv(&out.join("origins.csv")).runtime()?;
            Observations::HarrisWilson(data)
        }
    };
    io::write_dense(&out.join("network.csv"), &truth).runtime()?;
    write_manifest(out, "generate", config).runtime()?;
    Ok(Generated { truth, data, cuts })
}

fn expected_shape(config: &RunConfig) -> Option<(usize, usize)> {
    match &config.network {
        NetworkSource::Random { n, .. } | NetworkSource::Complete { n } | NetworkSource::PowerGrid { n, .. } => Some((*n, *n)),
        NetworkSource::HwCost { origins, destinations, .. } => Some((*origins, *destinations)),
        NetworkSource::File { .. } => None,
    }
}

/// Reads generated data and checks it against the configuration.
pub fn load_data(config: &RunConfig, dir: &Path) -> Result<Generated, Failure> {
    let network = dir.join("network.csv");
    if !network.is_file() {
        return Err(Failure::Config(anyhow!(
            "no generated data in {}; run `netinfer generate` first",
            dir.display()
        )));
    }
    let truth = io::read_dense(&network).runtime()?;
    let mismatch = |what: String| Failure::Config(anyhow!("data in {} does not match the configuration: {what}", dir.display()));
    if let Some(shape) = expected_shape(config) {
        if shape != (truth.rows(), truth.cols()) {
            return Err(mismatch(format!(
                "network is {}x{}, configuration asks for {}x{}",
                truth.rows(),
                truth.cols(),
                shape.0,
                shape.1
            )));
        }
    }
    let data = match config.model {
        ModelKind::HarrisWilson => {
            let (d, o) = (dir.join("destinations.csv"), dir.join("origins.csv"));
            if !d.is_file() || !o.is_file() {
                return Err(mismatch("Harris-Wilson runs need destinations.csv and origins.csv".into()));
            }
            let data = HwSeries::new(TimeSeries::read_csv(&d).runtime()?, TimeSeries::read_csv(&o).runtime()?).runtime()?;
            if (data.origins.n_nodes(), data.destinations.n_nodes()) != (truth.rows(), truth.cols()) {
                return Err(mismatch("series sizes differ from the cost network".into()));
            }
            Observations::HarrisWilson(data)
        }
        _ => {
            let s = dir.join("series.csv");
            if !s.is_file() {
                return Err(mismatch("Kuramoto runs need series.csv".into()));
            }
            let series = TimeSeries::read_csv(&s).runtime()?;
            if !truth.is_square() || series.n_nodes() != truth.rows() {
                return Err(mismatch(format!("{} series nodes for a {}x{} network", series.n_nodes(), truth.rows(), truth.cols())));
            }
            Observations::Kuramoto(series)
        }
    };
    let cuts_file = dir.join("cuts.csv");
    let cuts = if config.data.power_cut.is_some() && cuts_file.is_file() {
        read_numbers(&cuts_file, true)
            .runtime()?
            .into_iter()
            .map(|r| (r[0] as usize, r[1] as usize))
            .collect()
    } else {
        Vec::new()
    };
    if config.data.power_cut.is_some() && cuts.is_empty() {
        return Err(mismatch("power-cut runs need cuts.csv".into()));
    }
    Ok(Generated { truth, data, cuts })
}

/// Numeric CSV rows, naming the file and line of the first bad field.
fn read_numbers(path: &Path, headers: bool) -> anyhow::Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.with_context(|| format!("malformed {}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| anyhow!("malformed {} at line {line}: `{f}` is not a number", path.display()))
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn edge_errors(estimate: &[f64], truth: &[f64]) -> (f64, f64, f64) {
    let errs: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| (a - b).abs()).collect();
    let total: f64 = errs.iter().sum();
    (total, total / errs.len().max(1) as f64, errs.iter().cloned().fold(0.0, f64::max))
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len().is_multiple_of(2) { 0.5 * (v[m - 1] + v[m]) } else { v[m] })
}

/// Median epoch time with the first (warm-up) epoch left out.
fn median_epoch(seconds: &[f64]) -> Option<f64> {
    median(seconds.iter().skip(1).copied().collect())
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrainMetrics {
    pub l1_error: Option<f64>,
    pub final_loss: f64,
    pub mle_loss: f64,
    pub nu_released_at: Option<usize>,
    pub epochs: usize,
    pub samples: usize,
    pub training_segments: usize,
    pub median_epoch_seconds: Option<f64>,
}

pub fn train(config: &RunConfig, data_dir: &Path, out: &Path) -> Result<TrainMetrics, Failure> {
    let generated = load_data(config, data_dir)?;
    ensure_dir(out).runtime()?;
    let training = config.training_config();
    let mlp = config.mlp_config();
    let seed = config.seed;
    let subsample = config.data.subsample.as_ref();
    let kuramoto;
    let hw;
    let series;
    let hw_series;
    let (problem, segments) = match &generated.data {
        Observations::Kuramoto(s) => {
            series = match subsample {
                Some(sub) => core(s.subsample_windows(sub.windows, sub.len, seed))?,
                None => s.clone(),
            };
            kuramoto = kuramoto_params(config, s.n_nodes())?;
            let order = config.model.order().expect("Kuramoto model");
            (Problem::Kuramoto { data: &series, params: &kuramoto, order }, series.n_segments())
        }
        Observations::HarrisWilson(d) => {
            hw_series = match subsample {
                Some(sub) => core(d.subsample_windows(sub.windows, sub.len, seed))?,
                None => d.clone(),
            };
            hw = config.hw_params().config()?;
            (Problem::HarrisWilson { data: &hw_series, params: &hw }, hw_series.destinations.n_segments())
        }
    };
    let prior = (!generated.cuts.is_empty()).then_some(&generated.truth);
    let outcome = core(netinfer::inference::train(&training, &mlp, &problem, prior))?;
    let ensemble = &outcome.ensemble;
    ensemble.write(&out.join("ensemble.csv")).runtime()?;
    let mle_sample = core(ensemble.mle())?;
    let mle = core(ensemble.mle_network())?;
    io::write_dense(&out.join("mle.csv"), &mle).runtime()?;

    let history = outcome.history.iter().enumerate().map(|(k, t)| {
        [k as f64, t.data, t.symmetry, t.trace, t.prior, t.nu, t.total].iter().map(f64::to_string).collect()
    });
    write_table(
        &out.join("history.csv"),
        &["iteration", "data", "symmetry", "trace", "prior", "nu", "total"],
        history,
    )
    .runtime()?;
    let timing = outcome.epoch_seconds.iter().enumerate().map(|(e, s)| vec![e.to_string(), s.to_string()]);
    write_table(&out.join("timing.csv"), &["epoch", "seconds"], timing).runtime()?;

    let reference = generated.reference()?;
    let cols = reference.cols();
    let mut marginal_rows = Vec::new();
    let mut p_rows = Vec::new();
    for &(i, j) in &config.analysis.edges {
        let m = core(marginal_density(ensemble, (i, j), config.analysis.marginal_grid, None))?;
        for (x, d) in m.grid.iter().zip(&m.density) {
            marginal_rows.push(vec![i.to_string(), j.to_string(), x.to_string(), d.to_string()]);
        }
        let truth = reference.weights()[i * cols + j];
        p_rows.push(vec![
            i.to_string(),
            j.to_string(),
            truth.to_string(),
            m.mode().to_string(),
            edge_p_value(&m, truth).to_string(),
        ]);
    }
    write_table(&out.join("marginals.csv"), &["i", "j", "x", "density"], marginal_rows).runtime()?;
    write_table(&out.join("p_values.csv"), &["i", "j", "truth", "mode", "p_value"], p_rows).runtime()?;
    if !generated.cuts.is_empty() {
        write_ranked_edges(&out.join("ranked_edges.csv"), &generated, &mle, ensemble, config.analysis.marginal_grid)?;
    }

    let metrics = TrainMetrics {
        l1_error: Some(core(l1_error(mle.weights(), reference.weights()))?),
        final_loss: outcome.history.last().map_or(f64::NAN, |t| t.data),
        mle_loss: mle_sample.loss,
        nu_released_at: outcome.nu_released_at,
        epochs: training.epochs,
        samples: ensemble.len(),
        training_segments: segments,
        median_epoch_seconds: median_epoch(&outcome.epoch_seconds),
    };
    write_json(&out.join("metrics.json"), &metrics).runtime()?;
    write_manifest(out, "train", config).runtime()?;
    Ok(metrics)
}

/// Lines of the intact grid ranked by relative prediction error, with the
/// p-value of their original weight.
fn write_ranked_edges(
    path: &Path,
    generated: &Generated,
    mle: &AdjacencyMatrix,
    ensemble: &SampleEnsemble,
    grid: usize,
) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for (i, j, w) in generated.truth.undirected_edges() {
        let m = core(marginal_density(ensemble, (i, j), grid, None))?;
        let estimate = mle.get(i, j);
        rows.push((i, j, w, estimate, (estimate - w).abs() / w, edge_p_value(&m, w)));
    }
    rows.sort_by(|a, b| b.4.total_cmp(&a.4));
    let cut = |i: usize, j: usize| generated.cuts.contains(&(i, j)) || generated.cuts.contains(&(j, i));
    let table = rows.iter().enumerate().map(|(rank, &(i, j, w, est, rel, p))| {
        vec![
            (rank + 1).to_string(),
            i.to_string(),
            j.to_string(),
            w.to_string(),
            est.to_string(),
            rel.to_string(),
            p.to_string(),
            cut(i, j).to_string(),
        ]
    });
    write_table(path, &["rank", "i", "j", "a0", "estimate", "relative_error", "p_value", "cut"], table).runtime()
}

#[derive(Clone, Debug, Serialize)]
pub struct OlsSummary {
    pub convexity: usize,
    pub fully_determined: bool,
    pub observations: usize,
    pub ranks: Vec<usize>,
    pub rank_deficient: Vec<usize>,
    pub l1_error: f64,
}

pub fn infer_ols(config: &RunConfig, data_dir: &Path, out: &Path) -> Result<OlsSummary, Failure> {
    let order = config
        .model
        .order()
        .ok_or_else(|| Failure::Config(anyhow!("least squares applies to Kuramoto models only")))?;
    let generated = load_data(config, data_dir)?;
    ensure_dir(out).runtime()?;
    let Observations::Kuramoto(series) = &generated.data else {
        unreachable!("Kuramoto model loads a phase series")
    };
    let p = kuramoto_params(config, series.n_nodes())?;
    let gram = core(gram_convexity(series, &p, order))?;
    let ols = core(ols_infer(series, &p, order))?;
    let n = ols.n;
    let rows = ols.weights.chunks(n).map(|r| r.iter().map(f64::to_string).collect());
    let header: Vec<String> = (0..n).map(|j| format!("a_{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(&out.join("ols.csv"), &header, rows).runtime()?;
    let summary = OlsSummary {
        fully_determined: gram.fully_determined(),
        convexity: gram.convexity,
        observations: gram.observations,
        ranks: gram.ranks,
        rank_deficient: ols.rank_deficient,
        l1_error: core(l1_error(&ols.weights, generated.reference()?.weights()))?,
    };
    write_json(&out.join("ols.json"), &summary).runtime()?;
    write_manifest(out, "infer_ols", config).runtime()?;
    Ok(summary)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StatisticSummary {
    pub hellinger_band: Option<f64>,
    pub kl_total: Option<f64>,
    /// Hellinger distance between the best estimate and the truth.
    pub hellinger_to_truth: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AnalysisSummary {
    pub statistics: BTreeMap<String, StatisticSummary>,
    pub convexity: Option<usize>,
    pub neural_l1: Option<f64>,
    pub ols_l1: Option<f64>,
    pub median_epoch_seconds: Option<f64>,
    pub epochs_timed: usize,
}

pub fn stat_name(kind: Statistic) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{kind:?}"))
}

pub fn analyze(config: Option<&RunConfig>, data_dir: &Path, out: &Path) -> Result<AnalysisSummary, Failure> {
    let config = config.ok_or_else(|| {
        Failure::Config(anyhow!("no configuration: pass --config or analyze a directory with config.toml"))
    })?;
    let truth_file = data_dir.join("network.csv");
    let ensemble_file = data_dir.join("ensemble.csv");
    let ols_file = data_dir.join("ols.csv");
    if !truth_file.is_file() && !ensemble_file.is_file() {
        return Err(Failure::Config(anyhow!("nothing to analyze in {}", data_dir.display())));
    }
    ensure_dir(out).runtime()?;
    let hw = config.model == ModelKind::HarrisWilson;
    let truth = if truth_file.is_file() {
        let raw = io::read_dense(&truth_file).runtime()?;
        let mut reference = if hw { core(raw.row_normalized())? } else { raw };
        let cuts_file = data_dir.join("cuts.csv");
        if cuts_file.is_file() {
            for r in read_numbers(&cuts_file, true).runtime()? {
                core(reference.set_symmetric(r[0] as usize, r[1] as usize, 0.0))?;
            }
        }
        Some(reference)
    } else {
        None
    };
    let ensemble = if ensemble_file.is_file() {
        Some(SampleEnsemble::read(&ensemble_file).runtime()?)
    } else {
        None
    };
    let (rows, cols) = match (&truth, &ensemble) {
        (Some(t), _) => (t.rows(), t.cols()),
        (None, Some(e)) => (e.rows(), e.cols()),
        (None, None) => unreachable!("checked above"),
    };
    let mle = ensemble.as_ref().map(|e| core(e.mle_network())).transpose()?;
    let mut summary = AnalysisSummary::default();

    for &kind in &config.analysis.statistics {
        if kind == Statistic::Triangle && rows != cols {
            continue;
        }
        let truth_stats = truth.as_ref().map(|t| core(statistic(kind, t.weights(), rows, cols))).transpose()?;
        let mle_stats = mle.as_ref().map(|m| core(statistic(kind, m.weights(), rows, cols))).transpose()?;
        let all: Vec<f64> = truth_stats.iter().chain(&mle_stats).flatten().copied().collect();
        let grid = default_grid(&all);
        let h = default_bandwidth(truth_stats.as_ref().or(mle_stats.as_ref()).expect("one source"), &grid);
        let density = |w: &[f64]| core(distribution(kind, w, rows, cols, Some(&grid), Some(h))).map(|d| d.density);
        let truth_density = truth.as_ref().map(|t| density(t.weights())).transpose()?;
        let mut entry = StatisticSummary::default();
        let (mut mle_density, mut band, mut kl) = (None, None, None);
        if let Some(e) = &ensemble {
            let hel = core(hellinger_uncertainty(e, kind, Some(&grid), Some(h)))?;
            let klp = core(kl_uncertainty(e, kind, Some(&grid), Some(h)))?;
            entry.hellinger_band = Some(integrated_band(&hel));
            entry.kl_total = Some(klp.total);
            if let Some(td) = &truth_density {
                entry.hellinger_to_truth = Some(core(hellinger_distance(&hel.density, td, &grid))?);
            }
            mle_density = Some(hel.density);
            band = hel.band;
            kl = Some(klp.profile);
        }
        let at = |v: &Option<Vec<f64>>, k: usize| field(v.as_ref().map(|x| x[k]));
        let table = (0..grid.len()).map(|k| {
            vec![grid[k].to_string(), at(&truth_density, k), at(&mle_density, k), at(&band, k), at(&kl, k)]
        });
        write_table(
            &out.join(format!("distribution_{}.csv", stat_name(kind))),
            &["x", "truth_density", "mle_density", "hellinger_band", "kl_profile"],
            table,
        )
        .runtime()?;
        summary.statistics.insert(stat_name(kind), entry);
    }

    if let (Some(order), true) = (config.model.order(), data_dir.join("series.csv").is_file()) {
        let series = TimeSeries::read_csv(&data_dir.join("series.csv")).runtime()?;
        let p = kuramoto_params(config, series.n_nodes())?;
        let gram = core(gram_convexity(&series, &p, order))?;
        write_json(&out.join("convexity.json"), &gram).runtime()?;
        summary.convexity = Some(gram.convexity);
    }

    if let Some(t) = &truth {
        let mut rows_out = Vec::new();
        if let Some(m) = &mle {
            let (l1, mean, max) = edge_errors(m.weights(), t.weights());
            summary.neural_l1 = Some(l1);
            rows_out.push(vec!["neural".into(), l1.to_string(), mean.to_string(), max.to_string()]);
        }
        if ols_file.is_file() {
            let ols: Vec<f64> = read_numbers(&ols_file, true).runtime()?.concat();
            if ols.len() != t.weights().len() {
                return Err(Failure::Runtime(anyhow!("{} does not match the network size", ols_file.display())));
            }
            let (l1, mean, max) = edge_errors(&ols, t.weights());
            summary.ols_l1 = Some(l1);
            rows_out.push(vec!["ols".into(), l1.to_string(), mean.to_string(), max.to_string()]);
        }
        if !rows_out.is_empty() {
            write_table(&out.join("comparison.csv"), &COMPARISON_COLUMNS, rows_out).runtime()?;
        }
    }

    let timing_file = data_dir.join("timing.csv");
    if timing_file.is_file() {
        let seconds: Vec<f64> = read_numbers(&timing_file, true).runtime()?.iter().map(|r| r[1]).collect();
        summary.epochs_timed = seconds.len().saturating_sub(1);
        summary.median_epoch_seconds = median_epoch(&seconds);
    }
    write_json(&out.join("analysis.json"), &summary).runtime()?;
    write_manifest(out, "analyze", config).runtime()?;
    Ok(summary)
}
