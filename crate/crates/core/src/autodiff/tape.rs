use crate::error::{invalid, shape_err, Error, Result};

use super::tensor::{matmul_into, Tensor};

/// Handle to a value recorded on a [`Tape`].
///
/// Handles carry the tape generation they were created in; using one after
/// [`Tape::clear`] is rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var {
    index: usize,
    generation: u64,
}

impl Var {
    pub fn index(&self) -> usize {
        self.index
    }
}

/// Primitive operation kinds supported by the tape.
#[derive(Clone, Debug, PartialEq)]
pub enum OpKind {
    Add,
    Sub,
    Scale(f64),
    MatMul,
    Mul,
    Pow(f64),
    Sin,
    Exp,
    Tanh,
    Sigmoid,
    HardSigmoid,
    Trace,
    Transpose,
    /// `diag(A·B)` as a column vector.
    DiagProduct,
    RowSum,
    L1Norm,
    L2Norm,
    Reshape(Vec<usize>),
    /// Vertical stack of matrices sharing a column count.
    Concat,
}

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    Scale(usize, f64),
    MatMul(usize, usize),
    Mul(usize, usize),
    Pow(usize, f64),
    Sin(usize),
    Exp(usize),
    Tanh(usize),
    Sigmoid(usize),
    HardSigmoid(usize),
    Trace(usize),
    Transpose(usize),
    DiagProduct(usize, usize),
    RowSum(usize),
    L1(usize),
    L2(usize),
    Reshape(usize),
    Concat(Vec<usize>),
}

struct Node {
    value: Tensor,
    op: Op,
    tracked: bool,
}

/// Append-only record of a forward computation for reverse-mode
/// differentiation. Insertion order is a valid topological order.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
    generation: u64,
}

/// Gradients of one backward pass, indexed by the handles of that tape.
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
    generation: u64,
}

impl Gradients {
    /// Gradient for `var`, or `None` if no path connects it to the output.
    pub fn get(&self, var: Var) -> Option<&Tensor> {
        if var.generation != self.generation {
            return None;
        }
        self.grads.get(var.index).and_then(|g| g.as_ref())
    }

    /// Gradient for `var`, zero-filled to `like`'s shape when disconnected.
    pub fn get_or_zero(&self, var: Var, like: &Tensor) -> Tensor {
        self.get(var)
            .cloned()
            .unwrap_or_else(|| Tensor::zeros(like.shape()))
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Drops all recorded nodes. Outstanding handles become stale.
    pub fn clear(&mut self) {
        self.nodes.clear();
        self.generation += 1;
    }

    /// Records a differentiable leaf.
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Records a constant leaf; no gradient flows into it.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, var: Var) -> Result<&Tensor> {
        let i = self.check(var)?;
        Ok(&self.nodes[i].value)
    }

    /// First element of the value; intended for `[1, 1]` results.
    pub fn scalar(&self, var: Var) -> Result<f64> {
        Ok(self.value(var)?.data()[0])
    }

    fn push(&mut self, value: Tensor, op: Op, tracked: bool) -> Var {
        self.nodes.push(Node { value, op, tracked });
        Var {
            index: self.nodes.len() - 1,
            generation: self.generation,
        }
    }

    fn check(&self, var: Var) -> Result<usize> {
        if var.generation != self.generation || var.index >= self.nodes.len() {
            return Err(Error::StaleTape);
        }
        Ok(var.index)
    }

    fn tracked(&self, idx: &[usize]) -> bool {
        idx.iter().any(|&i| self.nodes[i].tracked)
    }

    fn val(&self, i: usize) -> &Tensor {
        &self.nodes[i].value
    }

    /// Applies `kind` to `operands`. Named methods are the usual entry
    /// points; this form exists for generic drivers such as gradient checks.
    pub fn apply(&mut self, kind: &OpKind, operands: &[Var]) -> Result<Var> {
        let arity = match kind {
            OpKind::Add | OpKind::Sub | OpKind::MatMul | OpKind::Mul | OpKind::DiagProduct => 2,
            OpKind::Concat => operands.len().max(1),
            _ => 1,
        };
        if operands.len() != arity {
            return shape_err(
                "apply",
                format!("{kind:?} takes {arity} operands, got {}", operands.len()),
            );
        }
        let a = operands[0];
        match kind {
            OpKind::Add => self.add(a, operands[1]),
            OpKind::Sub => self.sub(a, operands[1]),
            OpKind::Scale(c) => self.scale(a, *c),
            OpKind::MatMul => self.matmul(a, operands[1]),
            OpKind::Mul => self.mul(a, operands[1]),
            OpKind::Pow(p) => self.pow(a, *p),
            OpKind::Sin => self.sin(a),
            OpKind::Exp => self.exp(a),
            OpKind::Tanh => self.tanh(a),
            OpKind::Sigmoid => self.sigmoid(a),
            OpKind::HardSigmoid => self.hard_sigmoid(a),
            OpKind::Trace => self.trace(a),
            OpKind::Transpose => self.transpose(a),
            OpKind::DiagProduct => self.diag_product(a, operands[1]),
            OpKind::RowSum => self.row_sum(a),
            OpKind::L1Norm => self.l1_norm(a),
            OpKind::L2Norm => self.l2_norm(a),
            OpKind::Reshape(shape) => self.reshape(a, shape),
            OpKind::Concat => self.concat(operands),
        }
    }

    fn same_shape(&self, op: &'static str, a: usize, b: usize) -> Result<()> {
        if self.val(a).shape() != self.val(b).shape() {
            return shape_err(
                op,
                format!("{:?} vs {:?}", self.val(a).shape(), self.val(b).shape()),
            );
        }
        Ok(())
    }

    fn require_matrix(&self, op: &'static str, a: usize) -> Result<(usize, usize)> {
        let t = self.val(a);
        if !t.is_matrix() {
            return shape_err(op, format!("needs a matrix, got {:?}", t.shape()));
        }
        Ok((t.shape()[0], t.shape()[1]))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        self.same_shape("add", a, b)?;
        let v = self.val(a).zip_map(self.val(b), |x, y| x + y);
        let t = self.tracked(&[a, b]);
        Ok(self.push(v, Op::Add(a, b), t))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        self.same_shape("sub", a, b)?;
        let v = self.val(a).zip_map(self.val(b), |x, y| x - y);
        let t = self.tracked(&[a, b]);
        Ok(self.push(v, Op::Sub(a, b), t))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let a = self.check(a)?;
        let v = self.val(a).map(|x| c * x);
        let t = self.tracked(&[a]);
        Ok(self.push(v, Op::Scale(a, c), t))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        let v = self.val(a).matmul(self.val(b))?;
        let t = self.tracked(&[a, b]);
        Ok(self.push(v, Op::MatMul(a, b), t))
    }

    /// Hadamard product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        self.same_shape("mul", a, b)?;
        let v = self.val(a).zip_map(self.val(b), |x, y| x * y);
        let t = self.tracked(&[a, b]);
        Ok(self.push(v, Op::Mul(a, b), t))
    }

    /// Elementwise power. Non-integer exponents need nonnegative bases.
    pub fn pow(&mut self, a: Var, p: f64) -> Result<Var> {
        let a = self.check(a)?;
        if p.fract() != 0.0 && self.val(a).data().iter().any(|&x| x < 0.0) {
            return invalid(format!("pow: negative base with exponent {p}"));
        }
        let v = self.val(a).map(|x| x.powf(p));
        let t = self.tracked(&[a]);
        Ok(self.push(v, Op::Pow(a, p), t))
    }

    pub fn sin(&mut self, a: Var) -> Result<Var> {
        self.unary(a, f64::sin, Op::Sin)
    }

    pub fn exp(&mut self, a: Var) -> Result<Var> {
        self.unary(a, f64::exp, Op::Exp)
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        self.unary(a, f64::tanh, Op::Tanh)
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        self.unary(a, sigmoid, Op::Sigmoid)
    }

    pub fn hard_sigmoid(&mut self, a: Var) -> Result<Var> {
        self.unary(a, hard_sigmoid, Op::HardSigmoid)
    }

    fn unary(&mut self, a: Var, f: fn(f64) -> f64, op: fn(usize) -> Op) -> Result<Var> {
        let a = self.check(a)?;
        let v = self.val(a).map(f);
        let t = self.tracked(&[a]);
        Ok(self.push(v, op(a), t))
    }

    pub fn trace(&mut self, a: Var) -> Result<Var> {
        let a = self.check(a)?;
        let (r, c) = self.require_matrix("trace", a)?;
        if r != c {
            return shape_err("trace", format!("needs a square matrix, got {r}x{c}"));
        }
        let tr = (0..r).map(|i| self.val(a).get(i, i)).sum();
        let t = self.tracked(&[a]);
        Ok(self.push(Tensor::raw(vec![1, 1], vec![tr]), Op::Trace(a), t))
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var> {
        let a = self.check(a)?;
        let v = self.val(a).transpose()?;
        let t = self.tracked(&[a]);
        Ok(self.push(v, Op::Transpose(a), t))
    }

    /// `diag(A·B)` without forming the full product; result is `[m, 1]`.
    pub fn diag_product(&mut self, a: Var, b: Var) -> Result<Var> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        let (m, k) = self.require_matrix("diag_product", a)?;
        let (k2, m2) = self.require_matrix("diag_product", b)?;
        if k != k2 || m != m2 {
            return shape_err("diag_product", format!("{m}x{k} with {k2}x{m2}"));
        }
        let (av, bv) = (self.val(a).data(), self.val(b).data());
        let d = (0..m)
            .map(|i| (0..k).map(|p| av[i * k + p] * bv[p * m + i]).sum())
            .collect();
        let t = self.tracked(&[a, b]);
        Ok(self.push(Tensor::raw(vec![m, 1], d), Op::DiagProduct(a, b), t))
    }

    pub fn row_sum(&mut self, a: Var) -> Result<Var> {
        let a = self.check(a)?;
        let (r, c) = self.require_matrix("row_sum", a)?;
        let av = self.val(a).data();
        let s = (0..r).map(|i| av[i * c..(i + 1) * c].iter().sum()).collect();
        let t = self.tracked(&[a]);
        Ok(self.push(Tensor::raw(vec![r, 1], s), Op::RowSum(a), t))
    }

    pub fn l1_norm(&mut self, a: Var) -> Result<Var> {
        let a = self.check(a)?;
        let n = self.val(a).norm_l1();
        let t = self.tracked(&[a]);
        Ok(self.push(Tensor::raw(vec![1, 1], vec![n]), Op::L1(a), t))
    }

    /// Euclidean (Frobenius) norm. Its gradient at the zero tensor is taken
    /// to be zero.
    pub fn l2_norm(&mut self, a: Var) -> Result<Var> {
        let a = self.check(a)?;
        let n = self.val(a).norm_l2();
        let t = self.tracked(&[a]);
        Ok(self.push(Tensor::raw(vec![1, 1], vec![n]), Op::L2(a), t))
    }

    pub fn reshape(&mut self, a: Var, shape: &[usize]) -> Result<Var> {
        let a = self.check(a)?;
        let v = self.val(a).reshape(shape)?;
        let t = self.tracked(&[a]);
        Ok(self.push(v, Op::Reshape(a), t))
    }

    pub fn concat(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return shape_err("concat", "no operands");
        }
        let idx = parts
            .iter()
            .map(|&p| self.check(p))
            .collect::<Result<Vec<_>>>()?;
        let (_, cols) = self.require_matrix("concat", idx[0])?;
        let mut rows = 0;
        let mut data = Vec::new();
        for &i in &idx {
            let (r, c) = self.require_matrix("concat", i)?;
            if c != cols {
                return shape_err("concat", format!("column counts {cols} and {c}"));
            }
            rows += r;
            data.extend_from_slice(self.val(i).data());
        }
        let t = self.tracked(&idx);
        Ok(self.push(Tensor::raw(vec![rows, cols], data), Op::Concat(idx), t))
    }

    /// Reverse sweep from `result` seeded with `seed`.
    ///
    /// Gradients accumulate in fixed reverse insertion order, so results are
    /// bitwise reproducible for identical inputs.
    pub fn backward(&self, result: Var, seed: &Tensor) -> Result<Gradients> {
        let out = self.check(result)?;
        if seed.shape() != self.val(out).shape() {
            return shape_err(
                "backward",
                format!(
                    "seed {:?} does not match result {:?}",
                    seed.shape(),
                    self.val(out).shape()
                ),
            );
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; out + 1];
        grads[out] = Some(seed.clone());

        for i in (0..=out).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            if !node.tracked {
                grads[i] = Some(g);
                continue;
            }
            match &node.op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    self.accumulate(&mut grads, *a, || g.clone());
                    self.accumulate(&mut grads, *b, || g.clone());
                }
                Op::Sub(a, b) => {
                    self.accumulate(&mut grads, *a, || g.clone());
                    self.accumulate(&mut grads, *b, || g.map(|x| -x));
                }
                Op::Scale(a, c) => self.accumulate(&mut grads, *a, || g.map(|x| c * x)),
                Op::MatMul(a, b) => {
                    let (av, bv) = (self.val(*a), self.val(*b));
                    let (m, k, n) = (av.shape()[0], av.shape()[1], bv.shape()[1]);
                    // dA = G·Bᵀ, dB = Aᵀ·G
                    self.accumulate(&mut grads, *a, || {
                        let bt = bv.transpose().expect("matrix");
                        let mut d = vec![0.0; m * k];
                        matmul_into(g.data(), bt.data(), &mut d, m, n, k);
                        Tensor::raw(vec![m, k], d)
                    });
                    self.accumulate(&mut grads, *b, || {
                        let at = av.transpose().expect("matrix");
                        let mut d = vec![0.0; k * n];
                        matmul_into(at.data(), g.data(), &mut d, k, m, n);
                        Tensor::raw(vec![k, n], d)
                    });
                }
                Op::Mul(a, b) => {
                    self.accumulate(&mut grads, *a, || g.zip_map(self.val(*b), |x, y| x * y));
                    self.accumulate(&mut grads, *b, || g.zip_map(self.val(*a), |x, y| x * y));
                }
                Op::Pow(a, p) => {
                    let p = *p;
                    self.accumulate(&mut grads, *a, || {
                        g.zip_map(self.val(*a), |gi, x| gi * p * x.powf(p - 1.0))
                    });
                }
                Op::Sin(a) => {
                    self.accumulate(&mut grads, *a, || g.zip_map(self.val(*a), |gi, x| gi * x.cos()))
                }
                Op::Exp(a) => {
                    self.accumulate(&mut grads, *a, || g.zip_map(&node.value, |gi, y| gi * y))
                }
                Op::Tanh(a) => self.accumulate(&mut grads, *a, || {
                    g.zip_map(&node.value, |gi, y| gi * (1.0 - y * y))
                }),
                Op::Sigmoid(a) => self.accumulate(&mut grads, *a, || {
                    g.zip_map(&node.value, |gi, y| gi * y * (1.0 - y))
                }),
                Op::HardSigmoid(a) => self.accumulate(&mut grads, *a, || {
                    g.zip_map(self.val(*a), |gi, x| gi * hard_sigmoid_slope(x))
                }),
                Op::Trace(a) => {
                    let n = self.val(*a).rows();
                    let gs = g.data()[0];
                    self.accumulate(&mut grads, *a, || {
                        let mut d = Tensor::zeros(&[n, n]);
                        for j in 0..n {
                            d.set(j, j, gs);
                        }
                        d
                    });
                }
                Op::Transpose(a) => {
                    self.accumulate(&mut grads, *a, || g.transpose().expect("matrix"))
                }
                Op::DiagProduct(a, b) => {
                    let (av, bv) = (self.val(*a), self.val(*b));
                    let (m, k) = (av.shape()[0], av.shape()[1]);
                    let gd = g.data();
                    // d_i = Σ_p A_ip B_pi
                    self.accumulate(&mut grads, *a, || {
                        Tensor::from_fn(m, k, |i, p| gd[i] * bv.data()[p * m + i])
                    });
                    self.accumulate(&mut grads, *b, || {
                        Tensor::from_fn(k, m, |p, i| gd[i] * av.data()[i * k + p])
                    });
                }
                Op::RowSum(a) => {
                    let (r, c) = (self.val(*a).shape()[0], self.val(*a).shape()[1]);
                    let gd = g.data();
                    self.accumulate(&mut grads, *a, || Tensor::from_fn(r, c, |i, _| gd[i]));
                }
                Op::L1(a) => {
                    let gs = g.data()[0];
                    self.accumulate(&mut grads, *a, || {
                        self.val(*a).map(|x| {
                            if x > 0.0 {
                                gs
                            } else if x < 0.0 {
                                -gs
                            } else {
                                0.0
                            }
                        })
                    });
                }
                Op::L2(a) => {
                    let gs = g.data()[0];
                    let norm = node.value.data()[0];
                    self.accumulate(&mut grads, *a, || {
                        if norm == 0.0 {
                            Tensor::zeros(self.val(*a).shape())
                        } else {
                            self.val(*a).map(|x| gs * x / norm)
                        }
                    });
                }
                Op::Reshape(a) => {
                    let shape = self.val(*a).shape().to_vec();
                    self.accumulate(&mut grads, *a, || Tensor::raw(shape, g.data().to_vec()));
                }
                Op::Concat(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let len = self.val(p).len();
                        let shape = self.val(p).shape().to_vec();
                        let slice = &g.data()[offset..offset + len];
                        self.accumulate(&mut grads, p, || Tensor::raw(shape, slice.to_vec()));
                        offset += len;
                    }
                }
            }
            // Leaves keep their gradient for the caller.
            if matches!(node.op, Op::Leaf) {
                grads[i] = Some(g);
            }
        }
        Ok(Gradients {
            grads,
            generation: self.generation,
        })
    }

    fn accumulate(&self, grads: &mut [Option<Tensor>], target: usize, make: impl FnOnce() -> Tensor) {
        if !self.nodes[target].tracked {
            return;
        }
        let d = make();
        match &mut grads[target] {
            Some(existing) => existing.add_assign(&d),
            slot @ None => *slot = Some(d),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Piecewise-linear squashing: 0 below -3, 1 above +3, `x/6 + 1/2` between.
pub fn hard_sigmoid(x: f64) -> f64 {
    if x <= -3.0 {
        0.0
    } else if x >= 3.0 {
        1.0
    } else {
        x / 6.0 + 0.5
    }
}

/// Subgradient used in the backward pass; the kinks take the interior slope.
pub fn hard_sigmoid_slope(x: f64) -> f64 {
    if (-3.0..=3.0).contains(&x) {
        1.0 / 6.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: &[usize], data: &[f64]) -> Tensor {
        Tensor::new(shape.to_vec(), data.to_vec()).unwrap()
    }

    #[test]
    fn trace_of_identity() {
        let mut tape = Tape::new();
        let i = tape.constant(Tensor::identity(2));
        let tr = tape.trace(i).unwrap();
        assert_eq!(tape.scalar(tr).unwrap(), 2.0);
    }

    #[test]
    fn hard_sigmoid_values() {
        let mut tape = Tape::new();
        let x = tape.constant(t(&[3, 1], &[-3.0, 0.0, 3.0]));
        let y = tape.hard_sigmoid(x).unwrap();
        assert_eq!(tape.value(y).unwrap().data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn hard_sigmoid_kink_uses_interior_slope() {
        assert_eq!(hard_sigmoid_slope(3.0), 1.0 / 6.0);
        assert_eq!(hard_sigmoid_slope(-3.0), 1.0 / 6.0);
        assert_eq!(hard_sigmoid_slope(3.0 + 1e-12), 0.0);
    }

    #[test]
    fn diag_product_hand_example() {
        let s = 1.0f64.sin();
        let mut tape = Tape::new();
        let a = tape.constant(t(&[2, 2], &[0.0, 1.0, 1.0, 0.0]));
        let g = tape.constant(t(&[2, 2], &[0.0, s, -s, 0.0]));
        let d = tape.diag_product(a, g).unwrap();
        assert_eq!(tape.value(d).unwrap().data(), &[-s, s]);
    }

    #[test]
    fn sin_derivative_at_zero() {
        let mut tape = Tape::new();
        let x = tape.param(Tensor::scalar(0.0).unwrap());
        let y = tape.sin(x).unwrap();
        let g = tape.backward(y, &Tensor::scalar(1.0).unwrap()).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[1.0]);
    }

    #[test]
    fn asymmetry_penalty_gradient_vanishes_when_symmetric() {
        let mut tape = Tape::new();
        let a = tape.param(t(&[2, 2], &[0.0, 0.3, 0.3, 0.0]));
        let at = tape.transpose(a).unwrap();
        let d = tape.sub(a, at).unwrap();
        let n = tape.l2_norm(d).unwrap();
        let g = tape.backward(n, &Tensor::scalar(1.0).unwrap()).unwrap();
        assert!(g.get(a).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch_is_named() {
        let mut tape = Tape::new();
        let a = tape.constant(Tensor::zeros(&[2, 2]));
        let b = tape.constant(Tensor::zeros(&[3, 1]));
        let err = tape.add(a, b).unwrap_err().to_string();
        assert!(err.contains("add") && err.contains("[2, 2]") && err.contains("[3, 1]"));
        assert!(tape.matmul(a, b).is_err());
        assert!(tape.diag_product(a, b).is_err());
    }

    #[test]
    fn stale_handles_rejected() {
        let mut tape = Tape::new();
        let x = tape.param(Tensor::scalar(1.0).unwrap());
        let y = tape.sin(x).unwrap();
        tape.clear();
        assert!(matches!(
            tape.backward(y, &Tensor::scalar(1.0).unwrap()),
            Err(Error::StaleTape)
        ));
        assert!(tape.value(x).is_err());
    }

    #[test]
    fn seed_shape_checked() {
        let mut tape = Tape::new();
        let x = tape.param(Tensor::zeros(&[2, 1]));
        assert!(tape.backward(x, &Tensor::zeros(&[1, 1])).is_err());
    }

    #[test]
    fn shared_operand_accumulates() {
        // y = x ⊙ x → dy/dx = 2x
        let mut tape = Tape::new();
        let x = tape.param(t(&[2, 1], &[1.5, -2.0]));
        let y = tape.mul(x, x).unwrap();
        let g = tape.backward(y, &Tensor::ones(&[2, 1])).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[3.0, -4.0]);
    }

    #[test]
    fn constants_receive_no_gradient() {
        let mut tape = Tape::new();
        let x = tape.param(Tensor::scalar(2.0).unwrap());
        let c = tape.constant(Tensor::scalar(3.0).unwrap());
        let y = tape.mul(x, c).unwrap();
        let g = tape.backward(y, &Tensor::scalar(1.0).unwrap()).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[3.0]);
        assert!(g.get(c).is_none());
    }
}
