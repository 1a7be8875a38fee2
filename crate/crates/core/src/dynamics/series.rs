use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::stream;

/// Observed trajectories, split into independent segments of states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    n_nodes: usize,
    segments: Vec<Vec<Vec<f64>>>,
}

impl TimeSeries {
    pub fn new(n_nodes: usize, segments: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        for (s, seg) in segments.iter().enumerate() {
            for (t, state) in seg.iter().enumerate() {
                if state.len() != n_nodes {
                    return invalid(format!(
                        "segment {s} state {t} has {} values for {n_nodes} nodes",
                        state.len()
                    ));
                }
                if state.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite(format!("segment {s} state {t}")));
                }
            }
        }
        Ok(Self { n_nodes, segments })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn segments(&self) -> &[Vec<Vec<f64>>] {
        &self.segments
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn total_states(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }

    pub fn min_segment_len(&self) -> usize {
        self.segments.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Rejects series too short for the requested history.
    pub fn require_segment_len(&self, min_len: usize) -> Result<()> {
        if self.segments.is_empty() {
            return invalid("time series has no segments");
        }
        if let Some(s) = self.segments.iter().position(|seg| seg.len() < min_len) {
            return invalid(format!(
                "segment {s} has {} states, at least {min_len} needed",
                self.segments[s].len()
            ));
        }
        Ok(())
    }

    /// Writes `segment,t,x_0,…` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["segment".to_string(), "t".to_string()];
        header.extend((0..self.n_nodes).map(|i| format!("x_{i}")));
        w.write_record(&header)?;
        for (s, seg) in self.segments.iter().enumerate() {
            for (t, state) in seg.iter().enumerate() {
                let mut row = vec![s.to_string(), t.to_string()];
                row.extend(state.iter().map(|x| x.to_string()));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a file written by [`TimeSeries::write_csv`]. Rows of a segment
    /// must be contiguous and in time order.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = path.display().to_string();
        let mut rdr = crate::graphs::io::reader(path, true)?;
        let n_nodes = rdr.headers()?.len().saturating_sub(2);
        let rows = crate::graphs::io::read_numeric_rows(path, true)?;
        let mut segments: Vec<Vec<Vec<f64>>> = Vec::new();
        for (line, values) in rows {
            let err = |reason: String| Error::Parse {
                file: file.clone(),
                line: line as usize,
                reason,
            };
            if values.len() != n_nodes + 2 {
                return Err(err(format!("expected {} columns, got {}", n_nodes + 2, values.len())));
            }
            let (s, t) = (values[0], values[1]);
            if s < 0.0 || s.fract() != 0.0 || t < 0.0 || t.fract() != 0.0 {
                return Err(err("segment and t must be nonnegative integers".into()));
            }
            let (s, t) = (s as usize, t as usize);
            if s == segments.len() {
                segments.push(Vec::new());
            }
            if s + 1 != segments.len() || t != segments[s].len() {
                return Err(err(format!("row (segment {s}, t {t}) is out of order")));
            }
            segments[s].push(values[2..].to_vec());
        }
        Self::new(n_nodes, segments)
    }

    /// Draws `count` windows of `len` consecutive states uniformly from all
    /// admissible start positions.
    pub fn subsample_windows(&self, count: usize, len: usize, seed: u64) -> Result<Self> {
        let starts: Vec<(usize, usize)> = self
            .segments
            .iter()
            .enumerate()
            .flat_map(|(s, seg)| (0..=seg.len().saturating_sub(len)).filter(move |_| seg.len() >= len).map(move |t| (s, t)))
            .collect();
        if starts.is_empty() || len == 0 {
            return invalid(format!("no window of {len} states fits in the series"));
        }
        let mut rng = stream(seed, "subsample_windows");
        let segments = (0..count)
            .map(|_| {
                let (s, t) = starts[rng.random_range(0..starts.len())];
                self.segments[s][t..t + len].to_vec()
            })
            .collect();
        Self::new(self.n_nodes, segments)
    }
}

/// Harris-Wilson observations: destination sizes `W` with the matching
/// origin sizes `O` that drove them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HwSeries {
    pub destinations: TimeSeries,
    pub origins: TimeSeries,
}

impl HwSeries {
    pub fn new(destinations: TimeSeries, origins: TimeSeries) -> Result<Self> {
        let dl: Vec<usize> = destinations.segments().iter().map(Vec::len).collect();
        let ol: Vec<usize> = origins.segments().iter().map(Vec::len).collect();
        if dl != ol {
            return invalid("destination and origin series have different segment lengths");
        }
        Ok(Self { destinations, origins })
    }

    /// Same as [`TimeSeries::subsample_windows`], applied jointly.
    pub fn subsample_windows(&self, count: usize, len: usize, seed: u64) -> Result<Self> {
        Self::new(
            self.destinations.subsample_windows(count, len, seed)?,
            self.origins.subsample_windows(count, len, seed)?,
        )
    }
}
