use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

use super::tensor::Tensor;

/// Handle to a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Constant,
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Div(Var, Var),
    /// `[m,n] + [1,n]`, the bias add.
    AddRow(Var, Var),
    /// `[m,n] * [1,1]`.
    MulScalarVar(Var, Var),
    /// `[m,n] + [1,1]`.
    AddScalarVar(Var, Var),
    Scale(Var, f64),
    AddConst(Var, f64),
    /// Output row `r` is input row `idx[r]`.
    RowGather(Var, Vec<usize>),
    /// Output row `r` is `w[r] *` input row `r` (weights are data, not
    /// differentiated).
    RowScale(Var, Vec<f64>),
    /// Output row `seg[r]` accumulates input row `r`.
    SegmentSum(Var, Vec<usize>, usize),
    /// Columns `[start, start + len)` of the input.
    ColSlice(Var, usize, usize),
    /// Horizontal concatenation of same-height blocks.
    ColConcat(Vec<Var>),
    RowSum(Var),
    Sum(Var),
    Mean(Var),
    Sigmoid(Var),
    Tanh(Var),
    Relu(Var),
    Softplus(Var),
    SoftmaxRow(Var),
    LogSoftmaxRow(Var),
    Log(Var),
    /// `ln(max(x, floor))`; zero gradient at the floor.
    LogFloor(Var, f64),
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    rows: usize,
    cols: usize,
    value: Option<Tensor>,
    grad: Option<Tensor>,
}

/// Ordered record of primitive operations with shape inference at record
/// time. Bind leaves, run [`Tape::forward`], then [`Tape::backward`] from
/// any scalar (or seeded) output.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
    ran_forward: bool,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    fn push(&mut self, op: Op, rows: usize, cols: usize) -> Var {
        self.nodes.push(Node { op, rows, cols, value: None, grad: None });
        self.ran_forward = false;
        Var(self.nodes.len() - 1)
    }

    fn shape(&self, v: Var) -> (usize, usize) {
        (self.nodes[v.0].rows, self.nodes[v.0].cols)
    }

    /// Declare an input to be bound at forward time.
    pub fn leaf(&mut self, rows: usize, cols: usize) -> Var {
        self.push(Op::Leaf, rows, cols)
    }

    /// Embed a fixed tensor.
    pub fn constant(&mut self, value: Tensor) -> Var {
        let (rows, cols) = value.shape();
        let var = self.push(Op::Constant, rows, cols);
        self.nodes[var.0].value = Some(value);
        var
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, k) = self.shape(a);
        let (k2, n) = self.shape(b);
        if k != k2 {
            return Err(Error::DimensionError(format!("matmul {m}x{k} by {k2}x{n}")));
        }
        Ok(self.push(Op::MatMul(a, b), m, n))
    }

    fn same_shape(&mut self, a: Var, b: Var, name: &str) -> Result<(usize, usize)> {
        let sa = self.shape(a);
        let sb = self.shape(b);
        if sa != sb {
            return Err(Error::DimensionError(format!(
                "{name} on {}x{} and {}x{}",
                sa.0, sa.1, sb.0, sb.1
            )));
        }
        Ok(sa)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, n) = self.same_shape(a, b, "add")?;
        Ok(self.push(Op::Add(a, b), m, n))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, n) = self.same_shape(a, b, "sub")?;
        Ok(self.push(Op::Sub(a, b), m, n))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, n) = self.same_shape(a, b, "mul")?;
        Ok(self.push(Op::Mul(a, b), m, n))
    }

    pub fn div(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, n) = self.same_shape(a, b, "div")?;
        Ok(self.push(Op::Div(a, b), m, n))
    }

    /// Broadcast a `1xn` row over every row of `a`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var> {
        let (m, n) = self.shape(a);
        let (rr, rc) = self.shape(row);
        if rr != 1 || rc != n {
            return Err(Error::DimensionError(format!(
                "row broadcast {rr}x{rc} onto {m}x{n}"
            )));
        }
        Ok(self.push(Op::AddRow(a, row), m, n))
    }

    fn expect_scalar(&self, s: Var, name: &str) -> Result<()> {
        if self.shape(s) != (1, 1) {
            let (r, c) = self.shape(s);
            return Err(Error::DimensionError(format!("{name} wants a 1x1 scalar, got {r}x{c}")));
        }
        Ok(())
    }

    /// Multiply every entry by a trainable scalar.
    pub fn mul_scalar_var(&mut self, a: Var, s: Var) -> Result<Var> {
        self.expect_scalar(s, "mul_scalar_var")?;
        let (m, n) = self.shape(a);
        Ok(self.push(Op::MulScalarVar(a, s), m, n))
    }

    /// Add a trainable scalar to every entry.
    pub fn add_scalar_var(&mut self, a: Var, s: Var) -> Result<Var> {
        self.expect_scalar(s, "add_scalar_var")?;
        let (m, n) = self.shape(a);
        Ok(self.push(Op::AddScalarVar(a, s), m, n))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::Scale(a, c), m, n)
    }

    pub fn add_const(&mut self, a: Var, c: f64) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::AddConst(a, c), m, n)
    }

    /// Gather rows of `a` by index (repeats allowed).
    pub fn row_gather(&mut self, a: Var, idx: Vec<usize>) -> Result<Var> {
        let (m, n) = self.shape(a);
        if let Some(&bad) = idx.iter().find(|&&i| i >= m) {
            return Err(Error::IndexError { index: bad, len: m });
        }
        let k = idx.len();
        Ok(self.push(Op::RowGather(a, idx), k, n))
    }

    /// Scale each row by a fixed coefficient.
    pub fn row_scale(&mut self, a: Var, weights: Vec<f64>) -> Result<Var> {
        let (m, n) = self.shape(a);
        if weights.len() != m {
            return Err(Error::DimensionError(format!(
                "{} row weights for {m} rows",
                weights.len()
            )));
        }
        Ok(self.push(Op::RowScale(a, weights), m, n))
    }

    /// Sum rows of `a` into `out_rows` segments: output row `seg[r]`
    /// accumulates input row `r`. Rows of empty segments are zero.
    pub fn segment_sum(&mut self, a: Var, segments: Vec<usize>, out_rows: usize) -> Result<Var> {
        let (m, n) = self.shape(a);
        if segments.len() != m {
            return Err(Error::DimensionError(format!(
                "{} segment ids for {m} rows",
                segments.len()
            )));
        }
        if let Some(&bad) = segments.iter().find(|&&s| s >= out_rows) {
            return Err(Error::IndexError { index: bad, len: out_rows });
        }
        Ok(self.push(Op::SegmentSum(a, segments, out_rows), out_rows, n))
    }

    /// Columns `[start, start + len)` of `a`.
    pub fn col_slice(&mut self, a: Var, start: usize, len: usize) -> Result<Var> {
        let (m, n) = self.shape(a);
        if start + len > n || len == 0 {
            return Err(Error::DimensionError(format!(
                "column slice [{start}, {}) of a {m}x{n} tensor",
                start + len
            )));
        }
        Ok(self.push(Op::ColSlice(a, start, len), m, len))
    }

    /// Concatenate blocks horizontally; all must have the same row count.
    pub fn col_concat(&mut self, blocks: &[Var]) -> Result<Var> {
        let Some(&first) = blocks.first() else {
            return Err(Error::DimensionError("concat of zero blocks".into()));
        };
        let (m, _) = self.shape(first);
        let mut total = 0usize;
        for &b in blocks {
            let (bm, bn) = self.shape(b);
            if bm != m {
                return Err(Error::DimensionError(format!(
                    "concat of {m}-row and {bm}-row blocks"
                )));
            }
            total += bn;
        }
        Ok(self.push(Op::ColConcat(blocks.to_vec()), m, total))
    }

    /// Row-wise sum, `[m,n] -> [m,1]`.
    pub fn row_sum(&mut self, a: Var) -> Var {
        let (m, _) = self.shape(a);
        self.push(Op::RowSum(a), m, 1)
    }

    /// Sum of all entries, `[m,n] -> [1,1]`.
    pub fn sum(&mut self, a: Var) -> Var {
        self.push(Op::Sum(a), 1, 1)
    }

    /// Mean of all entries, `[m,n] -> [1,1]`.
    pub fn mean(&mut self, a: Var) -> Var {
        self.push(Op::Mean(a), 1, 1)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::Sigmoid(a), m, n)
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::Tanh(a), m, n)
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::Relu(a), m, n)
    }

    /// `ln(1 + e^x)`, the stable building block for cross-entropy from
    /// logits.
    pub fn softplus(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::Softplus(a), m, n)
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::SoftmaxRow(a), m, n)
    }

    pub fn log_softmax_rows(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::LogSoftmaxRow(a), m, n)
    }

    pub fn log(&mut self, a: Var) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::Log(a), m, n)
    }

    /// `ln(max(x, floor))` with zero gradient below the floor.
    pub fn log_floor(&mut self, a: Var, floor: f64) -> Var {
        let (m, n) = self.shape(a);
        self.push(Op::LogFloor(a, floor), m, n)
    }

    fn value_of(&self, v: Var) -> &Tensor {
        self.nodes[v.0].value.as_ref().expect("value computed in record order")
    }

    /// Bind leaves and evaluate every node in record order. Gradients from
    /// previous runs are cleared.
    pub fn forward(&mut self, bindings: &[(Var, &Tensor)]) -> Result<()> {
        for node in &mut self.nodes {
            node.grad = None;
            if !matches!(node.op, Op::Constant) {
                node.value = None;
            }
        }
        for &(var, tensor) in bindings {
            let node = &mut self.nodes[var.0];
            if !matches!(node.op, Op::Leaf) {
                return Err(Error::StateError("binding a non-leaf node"));
            }
            if tensor.shape() != (node.rows, node.cols) {
                return Err(Error::DimensionError(format!(
                    "leaf declared {}x{}, bound {}x{}",
                    node.rows,
                    node.cols,
                    tensor.rows(),
                    tensor.cols()
                )));
            }
            node.value = Some(tensor.clone());
        }
        for i in 0..self.nodes.len() {
            let value = match &self.nodes[i].op {
                Op::Leaf => match &self.nodes[i].value {
                    Some(_) => continue,
                    None => return Err(Error::StateError("leaf left unbound at forward")),
                },
                Op::Constant => continue,
                Op::MatMul(a, b) => self.value_of(*a).matmul(self.value_of(*b)),
                Op::Add(a, b) => self.value_of(*a).zip(self.value_of(*b), |x, y| x + y),
                Op::Sub(a, b) => self.value_of(*a).zip(self.value_of(*b), |x, y| x - y),
                Op::Mul(a, b) => self.value_of(*a).zip(self.value_of(*b), |x, y| x * y),
                Op::Div(a, b) => self.value_of(*a).zip(self.value_of(*b), |x, y| x / y),
                Op::AddRow(a, r) => {
                    let a = self.value_of(*a);
                    let row = self.value_of(*r);
                    let mut out = a.clone();
                    for i in 0..out.rows() {
                        for j in 0..out.cols() {
                            out.set(i, j, out.get(i, j) + row.get(0, j));
                        }
                    }
                    out
                }
                Op::MulScalarVar(a, s) => {
                    let c = self.value_of(*s).get(0, 0);
                    self.value_of(*a).map(|x| x * c)
                }
                Op::AddScalarVar(a, s) => {
                    let c = self.value_of(*s).get(0, 0);
                    self.value_of(*a).map(|x| x + c)
                }
                Op::Scale(a, c) => {
                    let c = *c;
                    self.value_of(*a).map(|x| x * c)
                }
                Op::AddConst(a, c) => {
                    let c = *c;
                    self.value_of(*a).map(|x| x + c)
                }
                Op::RowGather(a, idx) => {
                    let a = self.value_of(*a);
                    let mut out = Tensor::zeros(idx.len(), a.cols());
                    for (r, &src) in idx.iter().enumerate() {
                        let dst_start = r * a.cols();
                        out.data_mut()[dst_start..dst_start + a.cols()]
                            .copy_from_slice(a.row(src));
                    }
                    out
                }
                Op::RowScale(a, weights) => {
                    let a = self.value_of(*a);
                    let mut out = a.clone();
                    for (r, &w) in weights.iter().enumerate() {
                        for j in 0..a.cols() {
                            out.set(r, j, a.get(r, j) * w);
                        }
                    }
                    out
                }
                Op::SegmentSum(a, segments, out_rows) => {
                    let a = self.value_of(*a);
                    let mut out = Tensor::zeros(*out_rows, a.cols());
                    for (r, &seg) in segments.iter().enumerate() {
                        for j in 0..a.cols() {
                            out.set(seg, j, out.get(seg, j) + a.get(r, j));
                        }
                    }
                    out
                }
                Op::ColSlice(a, start, len) => {
                    let a = self.value_of(*a);
                    let (start, len) = (*start, *len);
                    let mut out = Tensor::zeros(a.rows(), len);
                    for r in 0..a.rows() {
                        let src = &a.row(r)[start..start + len];
                        out.data_mut()[r * len..(r + 1) * len].copy_from_slice(src);
                    }
                    out
                }
                Op::ColConcat(blocks) => {
                    let tensors: Vec<&Tensor> = blocks.iter().map(|&b| self.value_of(b)).collect();
                    let rows = tensors[0].rows();
                    let total: usize = tensors.iter().map(|t| t.cols()).sum();
                    let mut out = Tensor::zeros(rows, total);
                    for r in 0..rows {
                        let mut offset = 0usize;
                        for t in &tensors {
                            out.data_mut()[r * total + offset..r * total + offset + t.cols()]
                                .copy_from_slice(t.row(r));
                            offset += t.cols();
                        }
                    }
                    out
                }
                Op::RowSum(a) => {
                    let a = self.value_of(*a);
                    let mut out = Tensor::zeros(a.rows(), 1);
                    for r in 0..a.rows() {
                        out.set(r, 0, a.row(r).iter().sum());
                    }
                    out
                }
                Op::Sum(a) => Tensor::scalar(self.value_of(*a).data().iter().sum()),
                Op::Mean(a) => {
                    let a = self.value_of(*a);
                    Tensor::scalar(a.data().iter().sum::<f64>() / a.numel() as f64)
                }
                Op::Sigmoid(a) => self.value_of(*a).map(math::sigmoid),
                Op::Tanh(a) => self.value_of(*a).map(math::tanh),
                Op::Relu(a) => self.value_of(*a).map(|x| if x > 0.0 { x } else { 0.0 }),
                Op::Softplus(a) => self.value_of(*a).map(math::softplus),
                Op::SoftmaxRow(a) => {
                    let a = self.value_of(*a);
                    let mut out = a.clone();
                    for r in 0..a.rows() {
                        let row = a.row(r);
                        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let exps: Vec<f64> = row.iter().map(|&x| math::exp(x - max)).collect();
                        let z: f64 = exps.iter().sum();
                        for (j, e) in exps.into_iter().enumerate() {
                            out.set(r, j, e / z);
                        }
                    }
                    out
                }
                Op::LogSoftmaxRow(a) => {
                    let a = self.value_of(*a);
                    let mut out = a.clone();
                    for r in 0..a.rows() {
                        let row = a.row(r);
                        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let lse =
                            math::ln(row.iter().map(|&x| math::exp(x - max)).sum::<f64>()) + max;
                        for j in 0..a.cols() {
                            out.set(r, j, a.get(r, j) - lse);
                        }
                    }
                    out
                }
                Op::Log(a) => self.value_of(*a).map(math::ln),
                Op::LogFloor(a, floor) => {
                    let floor = *floor;
                    self.value_of(*a).map(|x| math::ln(if x > floor { x } else { floor }))
                }
            };
            self.nodes[i].value = Some(value);
        }
        self.ran_forward = true;
        Ok(())
    }

    /// Computed value of a node (after forward).
    pub fn value(&self, v: Var) -> Result<&Tensor> {
        if !self.ran_forward {
            return Err(Error::StateError("value before forward"));
        }
        Ok(self.value_of(v))
    }

    fn accumulate(&mut self, v: Var, delta: Tensor) {
        match &mut self.nodes[v.0].grad {
            Some(g) => g.add_assign(&delta),
            slot @ None => *slot = Some(delta),
        }
    }

    /// Reverse-mode sweep from `output`. The seed is the gradient of the
    /// final objective with respect to `output`; `None` seeds with ones
    /// (the usual case for a scalar loss).
    pub fn backward(&mut self, output: Var, seed: Option<&Tensor>) -> Result<()> {
        if !self.ran_forward {
            return Err(Error::StateError("backward before forward"));
        }
        let (rows, cols) = self.shape(output);
        let seed = match seed {
            Some(s) => {
                if s.shape() != (rows, cols) {
                    return Err(Error::DimensionError(format!(
                        "seed {}x{} for output {rows}x{cols}",
                        s.rows(),
                        s.cols()
                    )));
                }
                s.clone()
            }
            None => Tensor::filled(rows, cols, 1.0),
        };
        for node in &mut self.nodes {
            node.grad = None;
        }
        self.nodes[output.0].grad = Some(seed);

        for i in (0..self.nodes.len()).rev() {
            let Some(grad) = self.nodes[i].grad.clone() else {
                continue;
            };
            match self.nodes[i].op.clone() {
                Op::Leaf | Op::Constant => {}
                Op::MatMul(a, b) => {
                    let da = grad.matmul(&self.value_of(b).transpose());
                    let db = self.value_of(a).transpose().matmul(&grad);
                    self.accumulate(a, da);
                    self.accumulate(b, db);
                }
                Op::Add(a, b) => {
                    self.accumulate(a, grad.clone());
                    self.accumulate(b, grad);
                }
                Op::Sub(a, b) => {
                    self.accumulate(a, grad.clone());
                    self.accumulate(b, grad.map(|x| -x));
                }
                Op::Mul(a, b) => {
                    let da = grad.zip(self.value_of(b), |g, y| g * y);
                    let db = grad.zip(self.value_of(a), |g, x| g * x);
                    self.accumulate(a, da);
                    self.accumulate(b, db);
                }
                Op::Div(a, b) => {
                    let bv = self.value_of(b);
                    let da = grad.zip(bv, |g, y| g / y);
                    let av = self.value_of(a);
                    let mut db = Tensor::zeros(bv.rows(), bv.cols());
                    for idx in 0..db.numel() {
                        let g = grad.data()[idx];
                        let x = av.data()[idx];
                        let y = bv.data()[idx];
                        db.data_mut()[idx] = -g * x / (y * y);
                    }
                    self.accumulate(a, da);
                    self.accumulate(b, db);
                }
                Op::AddRow(a, r) => {
                    let mut dr = Tensor::zeros(1, grad.cols());
                    for i in 0..grad.rows() {
                        for j in 0..grad.cols() {
                            dr.set(0, j, dr.get(0, j) + grad.get(i, j));
                        }
                    }
                    self.accumulate(a, grad);
                    self.accumulate(r, dr);
                }
                Op::MulScalarVar(a, s) => {
                    let c = self.value_of(s).get(0, 0);
                    let da = grad.map(|g| g * c);
                    let ds = Tensor::scalar(
                        grad.data()
                            .iter()
                            .zip(self.value_of(a).data())
                            .map(|(&g, &x)| g * x)
                            .sum(),
                    );
                    self.accumulate(a, da);
                    self.accumulate(s, ds);
                }
                Op::AddScalarVar(a, s) => {
                    let ds = Tensor::scalar(grad.data().iter().sum());
                    self.accumulate(a, grad);
                    self.accumulate(s, ds);
                }
                Op::Scale(a, c) => self.accumulate(a, grad.map(|g| g * c)),
                Op::AddConst(a, _) => self.accumulate(a, grad),
                Op::RowGather(a, idx) => {
                    let (ar, ac) = self.shape(a);
                    let mut da = Tensor::zeros(ar, ac);
                    for (r, &src) in idx.iter().enumerate() {
                        for j in 0..ac {
                            da.set(src, j, da.get(src, j) + grad.get(r, j));
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::RowScale(a, weights) => {
                    let mut da = grad.clone();
                    for (r, &w) in weights.iter().enumerate() {
                        for j in 0..da.cols() {
                            da.set(r, j, da.get(r, j) * w);
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::SegmentSum(a, segments, _) => {
                    let (ar, ac) = self.shape(a);
                    let mut da = Tensor::zeros(ar, ac);
                    for (r, &seg) in segments.iter().enumerate() {
                        for j in 0..ac {
                            da.set(r, j, grad.get(seg, j));
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::ColSlice(a, start, len) => {
                    let (ar, ac) = self.shape(a);
                    let mut da = Tensor::zeros(ar, ac);
                    for r in 0..ar {
                        for j in 0..len {
                            da.set(r, start + j, grad.get(r, j));
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::ColConcat(blocks) => {
                    let mut offset = 0usize;
                    for b in blocks {
                        let (br, bc) = self.shape(b);
                        let mut db = Tensor::zeros(br, bc);
                        for r in 0..br {
                            for j in 0..bc {
                                db.set(r, j, grad.get(r, offset + j));
                            }
                        }
                        self.accumulate(b, db);
                        offset += bc;
                    }
                }
                Op::RowSum(a) => {
                    let (ar, ac) = self.shape(a);
                    let mut da = Tensor::zeros(ar, ac);
                    for r in 0..ar {
                        for j in 0..ac {
                            da.set(r, j, grad.get(r, 0));
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::Sum(a) => {
                    let (ar, ac) = self.shape(a);
                    self.accumulate(a, Tensor::filled(ar, ac, grad.get(0, 0)));
                }
                Op::Mean(a) => {
                    let (ar, ac) = self.shape(a);
                    let scale = grad.get(0, 0) / (ar * ac) as f64;
                    self.accumulate(a, Tensor::filled(ar, ac, scale));
                }
                Op::Sigmoid(a) => {
                    let y = self.value_of(Var(i));
                    let da = grad.zip(y, |g, y| g * y * (1.0 - y));
                    self.accumulate(a, da);
                }
                Op::Tanh(a) => {
                    let y = self.value_of(Var(i));
                    let da = grad.zip(y, |g, y| g * (1.0 - y * y));
                    self.accumulate(a, da);
                }
                Op::Relu(a) => {
                    let x = self.value_of(a);
                    let da = grad.zip(x, |g, x| if x > 0.0 { g } else { 0.0 });
                    self.accumulate(a, da);
                }
                Op::Softplus(a) => {
                    let x = self.value_of(a);
                    let da = grad.zip(x, |g, x| g * math::sigmoid(x));
                    self.accumulate(a, da);
                }
                Op::SoftmaxRow(a) => {
                    let y = self.value_of(Var(i));
                    let mut da = Tensor::zeros(y.rows(), y.cols());
                    for r in 0..y.rows() {
                        let dot: f64 =
                            (0..y.cols()).map(|j| grad.get(r, j) * y.get(r, j)).sum();
                        for j in 0..y.cols() {
                            da.set(r, j, y.get(r, j) * (grad.get(r, j) - dot));
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::LogSoftmaxRow(a) => {
                    let y = self.value_of(Var(i));
                    let mut da = Tensor::zeros(y.rows(), y.cols());
                    for r in 0..y.rows() {
                        let gsum: f64 = (0..y.cols()).map(|j| grad.get(r, j)).sum();
                        for j in 0..y.cols() {
                            let softmax = math::exp(y.get(r, j));
                            da.set(r, j, grad.get(r, j) - softmax * gsum);
                        }
                    }
                    self.accumulate(a, da);
                }
                Op::Log(a) => {
                    let x = self.value_of(a);
                    let da = grad.zip(x, |g, x| g / x);
                    self.accumulate(a, da);
                }
                Op::LogFloor(a, floor) => {
                    let x = self.value_of(a);
                    let da = grad.zip(x, |g, x| if x > floor { g / x } else { 0.0 });
                    self.accumulate(a, da);
                }
            }
        }
        Ok(())
    }

    /// Accumulated gradient of a node from the last backward sweep.
    pub fn grad(&self, v: Var) -> Option<&Tensor> {
        self.nodes[v.0].grad.as_ref()
    }
}
