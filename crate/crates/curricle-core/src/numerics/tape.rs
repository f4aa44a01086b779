use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use super::error::NumericsError;
use super::tensor::Tensor;
use crate::math;

static TAPE_IDS: AtomicU64 = AtomicU64::new(1);

/// Handle to a value recorded on a [`GradientTape`].
///
/// Ids carry the identity of the tape that produced them; feeding an id
/// to a different tape is a usage error, not undefined behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValueId {
    tape: u64,
    index: usize,
}

enum Stored<'p> {
    Owned(Tensor),
    Borrowed(&'p Tensor),
}

impl Stored<'_> {
    fn tensor(&self) -> &Tensor {
        match self {
            Stored::Owned(t) => t,
            Stored::Borrowed(t) => t,
        }
    }
}

enum Op {
    Leaf,
    Matmul { a: ValueId, b: ValueId },
    Add { a: ValueId, b: ValueId },
    AddRowBroadcast { a: ValueId, bias: ValueId },
    MulScalar { a: ValueId, factor: f64 },
    Relu { a: ValueId },
    Softmax { a: ValueId, axis: usize },
    MaskedSoftmaxRows { a: ValueId, keep: Vec<bool> },
    LayerNorm { x: ValueId, scale: ValueId, offset: ValueId, eps: f64 },
    CrossEntropy { logits: ValueId, label: usize },
    GatherRows { table: ValueId, rows: Vec<usize> },
    SliceRows { a: ValueId, start: usize, len: usize },
    SliceCols { a: ValueId, start: usize, len: usize },
    ConcatCols { parts: Vec<ValueId> },
    Transpose { a: ValueId },
    SumNodes { parts: Vec<ValueId> },
    SumElements { a: ValueId },
}

struct Node<'p> {
    stored: Stored<'p>,
    op: Op,
}

/// Ordered record of primitive operations; replaying it backward visits
/// operations in exact reverse order of recording.
///
/// The lifetime `'p` lets parameter and constant leaves borrow tensors
/// owned elsewhere (model parameters), so recording a step never copies
/// them.
pub struct GradientTape<'p> {
    id: u64,
    nodes: Vec<Node<'p>>,
    // node index of each registered parameter, in registration order
    params: Vec<usize>,
}

/// Per-parameter gradients produced by [`GradientTape::backward`], in
/// parameter registration order. Parameters the loss never reached hold
/// all-zero tensors.
pub struct Gradients {
    grads: Vec<Tensor>,
}

impl Gradients {
    pub fn get(&self, slot: usize) -> &Tensor {
        &self.grads[slot]
    }

    pub fn all(&self) -> &[Tensor] {
        &self.grads
    }

    pub fn len(&self) -> usize {
        self.grads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }
}

impl<'p> GradientTape<'p> {
    pub fn new() -> Self {
        Self {
            id: TAPE_IDS.fetch_add(1, Ordering::Relaxed),
            nodes: Vec::new(),
            params: Vec::new(),
        }
    }

    /// Registers a differentiable leaf; gradients are reported for it.
    pub fn parameter(&mut self, tensor: &'p Tensor) -> ValueId {
        let id = self.push_stored(Stored::Borrowed(tensor), Op::Leaf);
        self.params.push(id.index);
        id
    }

    /// Registers a non-differentiable borrowed leaf.
    pub fn constant_ref(&mut self, tensor: &'p Tensor) -> ValueId {
        self.push_stored(Stored::Borrowed(tensor), Op::Leaf)
    }

    /// Registers a non-differentiable owned leaf.
    pub fn constant(&mut self, tensor: Tensor) -> ValueId {
        self.push_stored(Stored::Owned(tensor), Op::Leaf)
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn value(&self, id: ValueId) -> Result<&Tensor, NumericsError> {
        Ok(self.node(id)?.stored.tensor())
    }

    pub fn scalar_value(&self, id: ValueId) -> Result<f64, NumericsError> {
        let t = self.value(id)?;
        if t.numel() != 1 {
            return Err(NumericsError::LossNotScalar {
                shape: t.shape().to_vec(),
            });
        }
        Ok(t.data()[0])
    }

    fn node(&self, id: ValueId) -> Result<&Node<'p>, NumericsError> {
        if id.tape != self.id {
            return Err(NumericsError::NotOnTape);
        }
        self.nodes.get(id.index).ok_or(NumericsError::NotOnTape)
    }

    fn push_stored(&mut self, stored: Stored<'p>, op: Op) -> ValueId {
        debug_assert!(stored.tensor().is_finite());
        let index = self.nodes.len();
        self.nodes.push(Node { stored, op });
        ValueId { tape: self.id, index }
    }

    fn push(&mut self, tensor: Tensor, op: Op) -> ValueId {
        self.push_stored(Stored::Owned(tensor), op)
    }

    fn two_d(&self, id: ValueId, op: &'static str) -> Result<(usize, usize), NumericsError> {
        let t = self.value(id)?;
        t.dims2().ok_or_else(|| NumericsError::NotTwoD {
            op,
            shape: t.shape().to_vec(),
        })
    }

    // ── Forward primitives ──────────────────────────────────────────

    /// Standard matrix product `a[m×k] · b[k×n]`.
    pub fn matmul(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, NumericsError> {
        let (m, k) = self.two_d(a, "matmul")?;
        let (k2, n) = self.two_d(b, "matmul")?;
        if k != k2 {
            return Err(NumericsError::ShapeMismatch {
                op: "matmul",
                left: self.value(a)?.shape().to_vec(),
                right: self.value(b)?.shape().to_vec(),
            });
        }
        let da = self.value(a)?.data();
        let db = self.value(b)?.data();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0.0;
                for p in 0..k {
                    acc += da[i * k + p] * db[p * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        Ok(self.push(Tensor::from_parts(vec![m, n], out), Op::Matmul { a, b }))
    }

    /// Elementwise sum of two same-shaped tensors.
    pub fn add(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, NumericsError> {
        let ta = self.value(a)?;
        let tb = self.value(b)?;
        if ta.shape() != tb.shape() {
            return Err(NumericsError::ShapeMismatch {
                op: "add",
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let shape = ta.shape().to_vec();
        let out: Vec<f64> = ta
            .data()
            .iter()
            .zip(tb.data().iter())
            .map(|(x, y)| x + y)
            .collect();
        Ok(self.push(Tensor::from_parts(shape, out), Op::Add { a, b }))
    }

    /// `a[m×n] + bias[n]`, bias broadcast over rows.
    pub fn add_row_broadcast(&mut self, a: ValueId, bias: ValueId) -> Result<ValueId, NumericsError> {
        let (m, n) = self.two_d(a, "add_row_broadcast")?;
        let tb = self.value(bias)?;
        if tb.shape() != [n] {
            return Err(NumericsError::ShapeMismatch {
                op: "add_row_broadcast",
                left: vec![m, n],
                right: tb.shape().to_vec(),
            });
        }
        let da = self.value(a)?.data();
        let db = self.value(bias)?.data();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[i * n + j] = da[i * n + j] + db[j];
            }
        }
        Ok(self.push(
            Tensor::from_parts(vec![m, n], out),
            Op::AddRowBroadcast { a, bias },
        ))
    }

    /// Multiplication by a compile-time-known finite scalar.
    pub fn mul_scalar(&mut self, a: ValueId, factor: f64) -> Result<ValueId, NumericsError> {
        if !factor.is_finite() {
            return Err(NumericsError::NonFinite { op: "mul_scalar" });
        }
        let ta = self.value(a)?;
        let shape = ta.shape().to_vec();
        let out: Vec<f64> = ta.data().iter().map(|x| x * factor).collect();
        Ok(self.push(Tensor::from_parts(shape, out), Op::MulScalar { a, factor }))
    }

    pub fn relu(&mut self, a: ValueId) -> Result<ValueId, NumericsError> {
        let ta = self.value(a)?;
        let shape = ta.shape().to_vec();
        let out: Vec<f64> = ta.data().iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect();
        Ok(self.push(Tensor::from_parts(shape, out), Op::Relu { a }))
    }

    /// Softmax along `axis`, computed with max-subtraction for stability.
    /// Along the axis, outputs are positive and sum to 1.
    pub fn softmax(&mut self, a: ValueId, axis: usize) -> Result<ValueId, NumericsError> {
        let ta = self.value(a)?;
        let shape = ta.shape().to_vec();
        if axis >= shape.len() {
            return Err(NumericsError::AxisOutOfRange {
                op: "softmax",
                axis,
                shape,
            });
        }
        let out = softmax_data(ta.data(), &shape, axis);
        Ok(self.push(Tensor::from_parts(shape, out), Op::Softmax { a, axis }))
    }

    /// Row softmax over a square score matrix where `keep[c]` marks the key
    /// positions that participate. Dropped columns are exactly 0 in every
    /// row; each row sums to 1 over the kept columns.
    pub fn masked_softmax_rows(&mut self, a: ValueId, keep: &[bool]) -> Result<ValueId, NumericsError> {
        let (m, n) = self.two_d(a, "masked_softmax_rows")?;
        if keep.len() != n {
            return Err(NumericsError::MaskLength {
                op: "masked_softmax_rows",
                mask: keep.len(),
                dim: n,
            });
        }
        if !keep.iter().any(|&k| k) {
            return Err(NumericsError::EmptyMask {
                op: "masked_softmax_rows",
            });
        }
        let da = self.value(a)?.data();
        let mut out = vec![0.0; m * n];
        for r in 0..m {
            let row = &da[r * n..(r + 1) * n];
            let mut max = f64::NEG_INFINITY;
            for c in 0..n {
                if keep[c] {
                    max = max.max(row[c]);
                }
            }
            let mut denom = 0.0;
            for c in 0..n {
                if keep[c] {
                    let e = math::exp(row[c] - max);
                    out[r * n + c] = e;
                    denom += e;
                }
            }
            for c in 0..n {
                if keep[c] {
                    out[r * n + c] /= denom;
                }
            }
        }
        Ok(self.push(
            Tensor::from_parts(vec![m, n], out),
            Op::MaskedSoftmaxRows { a, keep: keep.to_vec() },
        ))
    }

    /// Layer normalization of each row of `x[m×d]` with learned
    /// `scale[d]` and `offset[d]`.
    pub fn layer_norm(
        &mut self,
        x: ValueId,
        scale: ValueId,
        offset: ValueId,
        eps: f64,
    ) -> Result<ValueId, NumericsError> {
        let (m, d) = self.two_d(x, "layer_norm")?;
        let ts = self.value(scale)?;
        let to = self.value(offset)?;
        if ts.shape() != [d] || to.shape() != [d] {
            return Err(NumericsError::ShapeMismatch {
                op: "layer_norm",
                left: vec![m, d],
                right: if ts.shape() != [d] {
                    ts.shape().to_vec()
                } else {
                    to.shape().to_vec()
                },
            });
        }
        let dx = self.value(x)?.data();
        let ds = self.value(scale)?.data();
        let doff = self.value(offset)?.data();
        let mut out = vec![0.0; m * d];
        for r in 0..m {
            let row = &dx[r * d..(r + 1) * d];
            let (mean, inv_std) = row_moments(row, eps);
            for j in 0..d {
                out[r * d + j] = (row[j] - mean) * inv_std * ds[j] + doff[j];
            }
        }
        Ok(self.push(
            Tensor::from_parts(vec![m, d], out),
            Op::LayerNorm { x, scale, offset, eps },
        ))
    }

    /// `−log softmax(logits)[label]` for a logits vector of shape `[c]`
    /// or `[1×c]`.
    pub fn cross_entropy(&mut self, logits: ValueId, label: usize) -> Result<ValueId, NumericsError> {
        let t = self.value(logits)?;
        let c = flat_logits_len(t, "cross_entropy")?;
        if label >= c {
            return Err(NumericsError::LabelOutOfRange { label, classes: c });
        }
        let v = t.data();
        let max = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let mut denom = 0.0;
        for &x in v {
            denom += math::exp(x - max);
        }
        let loss = -(v[label] - max - math::ln(denom));
        Ok(self.push(Tensor::scalar(loss), Op::CrossEntropy { logits, label }))
    }

    /// Gathers `rows` of `table[v×d]` into a `[len×d]` tensor.
    pub fn gather_rows(&mut self, table: ValueId, rows: &[usize]) -> Result<ValueId, NumericsError> {
        let (v, d) = self.two_d(table, "gather_rows")?;
        if rows.is_empty() {
            return Err(NumericsError::NoOperands { op: "gather_rows" });
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= v) {
            return Err(NumericsError::RowOutOfRange {
                op: "gather_rows",
                index: bad,
                rows: v,
            });
        }
        let dt = self.value(table)?.data();
        let mut out = vec![0.0; rows.len() * d];
        for (i, &r) in rows.iter().enumerate() {
            out[i * d..(i + 1) * d].copy_from_slice(&dt[r * d..(r + 1) * d]);
        }
        Ok(self.push(
            Tensor::from_parts(vec![rows.len(), d], out),
            Op::GatherRows { table, rows: rows.to_vec() },
        ))
    }

    pub fn slice_rows(&mut self, a: ValueId, start: usize, len: usize) -> Result<ValueId, NumericsError> {
        let (m, n) = self.two_d(a, "slice_rows")?;
        if len == 0 || start + len > m {
            return Err(NumericsError::RangeOutOfBounds {
                op: "slice_rows",
                start,
                end: start + len,
                size: m,
            });
        }
        let da = self.value(a)?.data();
        let out = da[start * n..(start + len) * n].to_vec();
        Ok(self.push(
            Tensor::from_parts(vec![len, n], out),
            Op::SliceRows { a, start, len },
        ))
    }

    pub fn slice_cols(&mut self, a: ValueId, start: usize, len: usize) -> Result<ValueId, NumericsError> {
        let (m, n) = self.two_d(a, "slice_cols")?;
        if len == 0 || start + len > n {
            return Err(NumericsError::RangeOutOfBounds {
                op: "slice_cols",
                start,
                end: start + len,
                size: n,
            });
        }
        let da = self.value(a)?.data();
        let mut out = vec![0.0; m * len];
        for i in 0..m {
            out[i * len..(i + 1) * len].copy_from_slice(&da[i * n + start..i * n + start + len]);
        }
        Ok(self.push(
            Tensor::from_parts(vec![m, len], out),
            Op::SliceCols { a, start, len },
        ))
    }

    /// Concatenates 2-d tensors with equal row counts along columns.
    pub fn concat_cols(&mut self, parts: &[ValueId]) -> Result<ValueId, NumericsError> {
        if parts.is_empty() {
            return Err(NumericsError::NoOperands { op: "concat_cols" });
        }
        let (m, _) = self.two_d(parts[0], "concat_cols")?;
        let mut widths = Vec::with_capacity(parts.len());
        let mut total = 0usize;
        for &p in parts {
            let (mp, np) = self.two_d(p, "concat_cols")?;
            if mp != m {
                return Err(NumericsError::ShapeMismatch {
                    op: "concat_cols",
                    left: self.value(parts[0])?.shape().to_vec(),
                    right: self.value(p)?.shape().to_vec(),
                });
            }
            widths.push(np);
            total += np;
        }
        let mut out = vec![0.0; m * total];
        let mut offset = 0usize;
        for (idx, &p) in parts.iter().enumerate() {
            let np = widths[idx];
            let dp = self.value(p)?.data();
            for i in 0..m {
                out[i * total + offset..i * total + offset + np]
                    .copy_from_slice(&dp[i * np..(i + 1) * np]);
            }
            offset += np;
        }
        Ok(self.push(
            Tensor::from_parts(vec![m, total], out),
            Op::ConcatCols { parts: parts.to_vec() },
        ))
    }

    pub fn transpose(&mut self, a: ValueId) -> Result<ValueId, NumericsError> {
        let (m, n) = self.two_d(a, "transpose")?;
        let da = self.value(a)?.data();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[j * m + i] = da[i * n + j];
            }
        }
        Ok(self.push(Tensor::from_parts(vec![n, m], out), Op::Transpose { a }))
    }

    /// Elementwise sum of same-shaped nodes, accumulated in argument order.
    pub fn sum_nodes(&mut self, parts: &[ValueId]) -> Result<ValueId, NumericsError> {
        if parts.is_empty() {
            return Err(NumericsError::NoOperands { op: "sum_nodes" });
        }
        let shape = self.value(parts[0])?.shape().to_vec();
        for &p in parts {
            let tp = self.value(p)?;
            if tp.shape() != shape.as_slice() {
                return Err(NumericsError::ShapeMismatch {
                    op: "sum_nodes",
                    left: shape,
                    right: tp.shape().to_vec(),
                });
            }
        }
        let numel: usize = shape.iter().product();
        let mut out = vec![0.0; numel];
        for &p in parts {
            let dp = self.value(p)?.data();
            for (o, v) in out.iter_mut().zip(dp.iter()) {
                *o += v;
            }
        }
        Ok(self.push(
            Tensor::from_parts(shape, out),
            Op::SumNodes { parts: parts.to_vec() },
        ))
    }

    /// Sum of all entries, in row-major index order.
    pub fn sum_elements(&mut self, a: ValueId) -> Result<ValueId, NumericsError> {
        let da = self.value(a)?.data();
        let mut acc = 0.0;
        for &v in da {
            acc += v;
        }
        Ok(self.push(Tensor::scalar(acc), Op::SumElements { a }))
    }

    // ── Backward ────────────────────────────────────────────────────

    /// Accumulates gradients of `loss` with respect to every registered
    /// parameter, visiting recorded operations in exact reverse order.
    /// Parameters not reachable from `loss` get zero gradients.
    pub fn backward(&self, loss: ValueId) -> Result<Gradients, NumericsError> {
        let loss_node = self.node(loss)?;
        let loss_shape = loss_node.stored.tensor().shape();
        if loss_node.stored.tensor().numel() != 1 {
            return Err(NumericsError::LossNotScalar {
                shape: loss_shape.to_vec(),
            });
        }

        let mut grads: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .map(|n| vec![0.0; n.stored.tensor().numel()])
            .collect();
        grads[loss.index][0] = 1.0;

        for i in (0..self.nodes.len()).rev() {
            if matches!(self.nodes[i].op, Op::Leaf) {
                continue;
            }
            let g = core::mem::take(&mut grads[i]);
            match &self.nodes[i].op {
                Op::Leaf => unreachable!(),

                Op::Matmul { a, b } => {
                    let ta = self.nodes[a.index].stored.tensor();
                    let tb = self.nodes[b.index].stored.tensor();
                    let (m, k) = ta.dims2().unwrap();
                    let (_, n) = tb.dims2().unwrap();
                    let (da, db) = (ta.data(), tb.data());
                    {
                        let ga = &mut grads[a.index];
                        for i2 in 0..m {
                            for p in 0..k {
                                let mut acc = 0.0;
                                for j in 0..n {
                                    acc += g[i2 * n + j] * db[p * n + j];
                                }
                                ga[i2 * k + p] += acc;
                            }
                        }
                    }
                    {
                        let gb = &mut grads[b.index];
                        for p in 0..k {
                            for j in 0..n {
                                let mut acc = 0.0;
                                for i2 in 0..m {
                                    acc += da[i2 * k + p] * g[i2 * n + j];
                                }
                                gb[p * n + j] += acc;
                            }
                        }
                    }
                }

                Op::Add { a, b } => {
                    for (ga, gv) in grads[a.index].iter_mut().zip(g.iter()) {
                        *ga += gv;
                    }
                    for (gb, gv) in grads[b.index].iter_mut().zip(g.iter()) {
                        *gb += gv;
                    }
                }

                Op::AddRowBroadcast { a, bias } => {
                    for (ga, gv) in grads[a.index].iter_mut().zip(g.iter()) {
                        *ga += gv;
                    }
                    let n = self.nodes[bias.index].stored.tensor().numel();
                    let m = g.len() / n;
                    let gb = &mut grads[bias.index];
                    for i2 in 0..m {
                        for j in 0..n {
                            gb[j] += g[i2 * n + j];
                        }
                    }
                }

                Op::MulScalar { a, factor } => {
                    for (ga, gv) in grads[a.index].iter_mut().zip(g.iter()) {
                        *ga += factor * gv;
                    }
                }

                Op::Relu { a } => {
                    let xs = self.nodes[a.index].stored.tensor().data();
                    let ga = &mut grads[a.index];
                    for j in 0..g.len() {
                        if xs[j] > 0.0 {
                            ga[j] += g[j];
                        }
                    }
                }

                Op::Softmax { a, axis } => {
                    let out = self.nodes[i].stored.tensor();
                    let shape = out.shape();
                    let s = out.data();
                    let axis_len = shape[*axis];
                    let outer: usize = shape[..*axis].iter().product();
                    let inner: usize = shape[*axis + 1..].iter().product();
                    let ga = &mut grads[a.index];
                    for o in 0..outer {
                        for q in 0..inner {
                            let mut dot = 0.0;
                            for t in 0..axis_len {
                                let flat = o * axis_len * inner + t * inner + q;
                                dot += g[flat] * s[flat];
                            }
                            for t in 0..axis_len {
                                let flat = o * axis_len * inner + t * inner + q;
                                ga[flat] += s[flat] * (g[flat] - dot);
                            }
                        }
                    }
                }

                Op::MaskedSoftmaxRows { a, keep } => {
                    let out = self.nodes[i].stored.tensor();
                    let (m, n) = out.dims2().unwrap();
                    let s = out.data();
                    let ga = &mut grads[a.index];
                    for r in 0..m {
                        let mut dot = 0.0;
                        for c in 0..n {
                            if keep[c] {
                                dot += g[r * n + c] * s[r * n + c];
                            }
                        }
                        for c in 0..n {
                            if keep[c] {
                                ga[r * n + c] += s[r * n + c] * (g[r * n + c] - dot);
                            }
                        }
                    }
                }

                Op::LayerNorm { x, scale, offset, eps } => {
                    let tx = self.nodes[x.index].stored.tensor();
                    let (m, d) = tx.dims2().unwrap();
                    let xs = tx.data();
                    let ss = self.nodes[scale.index].stored.tensor().data();
                    // dscale and doffset first, then dx row by row
                    for r in 0..m {
                        let row = &xs[r * d..(r + 1) * d];
                        let gr = &g[r * d..(r + 1) * d];
                        let (mean, inv_std) = row_moments(row, *eps);

                        {
                            let gs = &mut grads[scale.index];
                            for j in 0..d {
                                gs[j] += gr[j] * (row[j] - mean) * inv_std;
                            }
                        }
                        {
                            let go = &mut grads[offset.index];
                            for j in 0..d {
                                go[j] += gr[j];
                            }
                        }
                        {
                            let gx = &mut grads[x.index];
                            let mut sum_dxhat = 0.0;
                            let mut sum_dxhat_xhat = 0.0;
                            for j in 0..d {
                                let xhat = (row[j] - mean) * inv_std;
                                let dxhat = gr[j] * ss[j];
                                sum_dxhat += dxhat;
                                sum_dxhat_xhat += dxhat * xhat;
                            }
                            let df = d as f64;
                            for j in 0..d {
                                let xhat = (row[j] - mean) * inv_std;
                                let dxhat = gr[j] * ss[j];
                                gx[r * d + j] +=
                                    inv_std / df * (df * dxhat - sum_dxhat - xhat * sum_dxhat_xhat);
                            }
                        }
                    }
                }

                Op::CrossEntropy { logits, label } => {
                    let v = self.nodes[logits.index].stored.tensor().data();
                    let max = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
                    let mut denom = 0.0;
                    for &x in v {
                        denom += math::exp(x - max);
                    }
                    let g0 = g[0];
                    let gl = &mut grads[logits.index];
                    for c in 0..v.len() {
                        let p = math::exp(v[c] - max) / denom;
                        let y = if c == *label { 1.0 } else { 0.0 };
                        gl[c] += g0 * (p - y);
                    }
                }

                Op::GatherRows { table, rows } => {
                    let d = self.nodes[i].stored.tensor().dims2().unwrap().1;
                    let gt = &mut grads[table.index];
                    for (r, &row) in rows.iter().enumerate() {
                        for j in 0..d {
                            gt[row * d + j] += g[r * d + j];
                        }
                    }
                }

                Op::SliceRows { a, start, len } => {
                    let n = self.nodes[a.index].stored.tensor().dims2().unwrap().1;
                    let ga = &mut grads[a.index];
                    for r in 0..*len {
                        for j in 0..n {
                            ga[(start + r) * n + j] += g[r * n + j];
                        }
                    }
                }

                Op::SliceCols { a, start, len } => {
                    let (m, n) = self.nodes[a.index].stored.tensor().dims2().unwrap();
                    let ga = &mut grads[a.index];
                    for r in 0..m {
                        for j in 0..*len {
                            ga[r * n + start + j] += g[r * len + j];
                        }
                    }
                }

                Op::ConcatCols { parts } => {
                    let (m, total) = self.nodes[i].stored.tensor().dims2().unwrap();
                    let mut offset = 0usize;
                    for &p in parts {
                        let np = self.nodes[p.index].stored.tensor().dims2().unwrap().1;
                        let gp = &mut grads[p.index];
                        for r in 0..m {
                            for j in 0..np {
                                gp[r * np + j] += g[r * total + offset + j];
                            }
                        }
                        offset += np;
                    }
                }

                Op::Transpose { a } => {
                    let (m, n) = self.nodes[a.index].stored.tensor().dims2().unwrap();
                    let ga = &mut grads[a.index];
                    // output is [n×m]
                    for i2 in 0..m {
                        for j in 0..n {
                            ga[i2 * n + j] += g[j * m + i2];
                        }
                    }
                }

                Op::SumNodes { parts } => {
                    for &p in parts {
                        for (gp, gv) in grads[p.index].iter_mut().zip(g.iter()) {
                            *gp += gv;
                        }
                    }
                }

                Op::SumElements { a } => {
                    let g0 = g[0];
                    for gp in grads[a.index].iter_mut() {
                        *gp += g0;
                    }
                }
            }
        }

        let collected = self
            .params
            .iter()
            .map(|&node_idx| {
                let shape = self.nodes[node_idx].stored.tensor().shape().to_vec();
                Tensor::from_parts(shape, core::mem::take(&mut grads[node_idx]))
            })
            .collect();
        Ok(Gradients { grads: collected })
    }
}

impl Default for GradientTape<'_> {
    fn default() -> Self {
        Self::new()
    }
}

fn flat_logits_len(t: &Tensor, op: &'static str) -> Result<usize, NumericsError> {
    match t.shape() {
        [c] => Ok(*c),
        [1, c] => Ok(*c),
        shape => Err(NumericsError::NotTwoD {
            op,
            shape: shape.to_vec(),
        }),
    }
}

/// Mean and inverse standard deviation of one row.
fn row_moments(row: &[f64], eps: f64) -> (f64, f64) {
    let d = row.len() as f64;
    let mut mean = 0.0;
    for &v in row {
        mean += v;
    }
    mean /= d;
    let mut var = 0.0;
    for &v in row {
        var += (v - mean) * (v - mean);
    }
    var /= d;
    (mean, 1.0 / math::sqrt(var + eps))
}

/// Softmax along `axis` of a row-major buffer with the given shape.
pub(crate) fn softmax_data(data: &[f64], shape: &[usize], axis: usize) -> Vec<f64> {
    let axis_len = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; data.len()];
    for o in 0..outer {
        for q in 0..inner {
            let mut max = f64::NEG_INFINITY;
            for t in 0..axis_len {
                max = max.max(data[o * axis_len * inner + t * inner + q]);
            }
            let mut denom = 0.0;
            for t in 0..axis_len {
                let flat = o * axis_len * inner + t * inner + q;
                let e = math::exp(data[flat] - max);
                out[flat] = e;
                denom += e;
            }
            for t in 0..axis_len {
                out[o * axis_len * inner + t * inner + q] /= denom;
            }
        }
    }
    out
}
