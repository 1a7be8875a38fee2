use serde::{Deserialize, Serialize};

use crate::autodiff::Tensor;
use crate::error::{invalid, shape_err, Error, Result};

/// Dense nonnegative weight matrix, `rows × cols`. Kuramoto networks are
/// square; Harris-Wilson cost networks are origin × destination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

impl AdjacencyMatrix {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if rows * cols != weights.len() {
            return shape_err(
                "adjacency",
                format!("{rows}x{cols} needs {} weights, got {}", rows * cols, weights.len()),
            );
        }
        if let Some(k) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite(format!("adjacency weight ({}, {})", k / cols, k % cols)));
        }
        if let Some(k) = weights.iter().position(|&w| w < 0.0) {
            return invalid(format!(
                "adjacency weight ({}, {}) is negative: {}",
                k / cols,
                k % cols,
                weights[k]
            ));
        }
        Ok(Self { rows, cols, weights })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
        }
    }

    /// Complete graph on `n` nodes with unit weights and empty diagonal.
    pub fn complete(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    a.weights[i * n + j] = 1.0;
                }
            }
        }
        a
    }

    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        if !t.is_matrix() {
            return shape_err("adjacency", format!("needs a matrix, got {:?}", t.shape()));
        }
        Self::new(t.rows(), t.cols(), t.data().to_vec())
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols + j]
    }

    /// Sets one entry. Negative or non-finite weights are rejected.
    pub fn set(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if !(w >= 0.0 && w.is_finite()) {
            return invalid(format!("weight ({i}, {j}) must be finite and nonnegative, got {w}"));
        }
        self.weights[i * self.cols + j] = w;
        Ok(())
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        self.set(i, j, w)?;
        self.set(j, i, w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| self.get(i, i) == 0.0)
    }

    /// True when every node reaches every other along positive weights,
    /// reading the matrix as undirected.
    pub fn is_connected(&self) -> bool {
        let n = self.rows;
        if !self.is_square() || n == 0 {
            return n == 0;
        }
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && (self.get(i, j) > 0.0 || self.get(j, i) > 0.0) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Upper-triangle edges `(i, j, w)` with `i < j` and `w > 0`.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                let w = self.get(i, j);
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Scales every row to sum to one. A zero row cannot be normalized.
    pub fn row_normalized(&self) -> Result<Self> {
        let sums = self.row_sums();
        if let Some(i) = sums.iter().position(|&s| s <= 0.0) {
            return invalid(format!("row {i} sums to zero and cannot be normalized"));
        }
        let mut out = self.clone();
        for (i, s) in sums.iter().enumerate() {
            for w in &mut out.weights[i * self.cols..(i + 1) * self.cols] {
                *w /= s;
            }
        }
        Ok(out)
    }

    /// Checks the Kuramoto invariants: square, symmetric, zero diagonal and
    /// weights in `[0, 1]`.
    pub fn validate_undirected(&self) -> Result<()> {
        if !self.is_square() {
            return invalid(format!("network must be square, got {}x{}", self.rows, self.cols));
        }
        if !self.is_symmetric(0.0) {
            return invalid("network must be symmetric");
        }
        if !self.has_zero_diagonal() {
            return invalid("network must have a zero diagonal");
        }
        if self.weights.iter().any(|&w| w > 1.0) {
            return invalid("network weights must lie in [0, 1]");
        }
        Ok(())
    }
}
