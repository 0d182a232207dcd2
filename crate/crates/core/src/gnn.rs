//! The three encoder architectures: a plain MLP, a graph convolutional
//! encoder driven by the symmetric-normalized adjacency with self-loops,
//! and a GraphSAGE encoder with separate self/neighborhood transforms.
//!
//! Weight matrices are stored `F_l x F_{l+1}` acting on row-vector
//! activations (`Z W`). Neighborhood aggregation runs over the edge list as
//! gather / row-scale / segment-sum, never materializing a dense adjacency;
//! the per-node accumulation order is fixed (sorted by target, then
//! source), so outputs are deterministic and permutation-equivariant up to
//! floating-point roundoff.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::math;

/// Pointwise nonlinearity applied after each affine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
    Identity,
}

/// Encoder architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    Mlp,
    Gcn,
    Sage,
}

/// Weight given to the neighborhood sum in a GraphSAGE layer: `Sum` leaves
/// the raw sum (weight 1), `Mean` divides by the neighborhood size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborRule {
    Sum,
    Mean,
}

/// One layer's parameters. `w_neigh` is present only for GraphSAGE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub w: Tensor,
    pub w_neigh: Option<Tensor>,
    pub b: Tensor,
}

/// A layered encoder: dims `F_0 ... F_{L+1}`, one activation per affine
/// layer, and per-layer parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnModel {
    pub arch: Arch,
    pub dims: Vec<usize>,
    pub activations: Vec<Activation>,
    pub neighbor_rule: NeighborRule,
    pub layers: Vec<Layer>,
}

impl GnnModel {
    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().expect("dims nonempty")
    }

    /// Total trainable scalar count.
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| {
                l.w.numel() + l.b.numel() + l.w_neigh.as_ref().map_or(0, Tensor::numel)
            })
            .sum()
    }

    /// All parameter tensors in a fixed order (weights, neighbor weights,
    /// bias per layer).
    pub fn params(&self) -> Vec<&Tensor> {
        let mut out = Vec::new();
        for layer in &self.layers {
            out.push(&layer.w);
            if let Some(wn) = &layer.w_neigh {
                out.push(wn);
            }
            out.push(&layer.b);
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            out.push(&mut layer.w);
            if let Some(wn) = &mut layer.w_neigh {
                out.push(wn);
            }
            out.push(&mut layer.b);
        }
        out
    }

    pub fn param_shapes(&self) -> Vec<(usize, usize)> {
        self.params().iter().map(|t| t.shape()).collect()
    }
}

/// Glorot-uniform initialization: weights `U(+-sqrt(6 / (F_in + F_out)))`,
/// biases zero. Deterministic for a given seed.
pub fn init_model(
    arch: Arch,
    dims: &[usize],
    activations: &[Activation],
    seed: u64,
) -> Result<GnnModel> {
    if dims.len() < 2 {
        return Err(Error::DimensionError(format!("{} dims, need at least 2", dims.len())));
    }
    if activations.len() != dims.len() - 1 {
        return Err(Error::DimensionError(format!(
            "{} activations for {} layers",
            activations.len(),
            dims.len() - 1
        )));
    }
    if dims.contains(&0) {
        return Err(Error::DimensionError("zero-width layer".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(dims.len() - 1);
    for l in 0..dims.len() - 1 {
        let (fan_in, fan_out) = (dims[l], dims[l + 1]);
        let bound = math::sqrt(6.0 / (fan_in + fan_out) as f64);
        let w = Tensor::uniform(fan_in, fan_out, -bound, bound, &mut rng);
        let w_neigh = match arch {
            Arch::Sage => Some(Tensor::uniform(fan_in, fan_out, -bound, bound, &mut rng)),
            _ => None,
        };
        layers.push(Layer { w, w_neigh, b: Tensor::zeros(1, fan_out) });
    }
    Ok(GnnModel {
        arch,
        dims: dims.to_vec(),
        activations: activations.to_vec(),
        neighbor_rule: NeighborRule::Mean,
        layers,
    })
}

/// Per-edge coefficients of the symmetric-normalized adjacency with
/// self-loops: `A_hat[i][j] = 1 / sqrt(d~_i d~_j)` with `d~ = deg + 1`,
/// including the diagonal entries. Pairs are sorted by (target, source) so
/// each node accumulates its neighborhood in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    pub coeff: Vec<f64>,
    pub n: usize,
}

/// Normalized-adjacency coefficients of a graph.
pub fn normalized_adjacency(graph: &AttributedGraph) -> NormalizedAdjacency {
    normalized_adjacency_from(graph.n(), |v| graph.neighbors(v))
}

/// Same computation over any adjacency accessor (used by the rewiring
/// chain, whose graph is mutable).
pub fn normalized_adjacency_from<'a, F>(n: usize, neighbors: F) -> NormalizedAdjacency
where
    F: Fn(usize) -> &'a [usize],
{
    let inv_sqrt: Vec<f64> =
        (0..n).map(|v| 1.0 / math::sqrt(neighbors(v).len() as f64 + 1.0)).collect();
    let mut src = Vec::new();
    let mut dst = Vec::new();
    let mut coeff = Vec::new();
    for i in 0..n {
        // self-loop first, then sorted neighbors: fixed per-node order
        src.push(i);
        dst.push(i);
        coeff.push(inv_sqrt[i] * inv_sqrt[i]);
        for &j in neighbors(i) {
            src.push(j);
            dst.push(i);
            coeff.push(inv_sqrt[i] * inv_sqrt[j]);
        }
    }
    NormalizedAdjacency { src, dst, coeff, n }
}

/// Plain neighborhood aggregation pairs (no self-loops) with the optional
/// mean scaling, for GraphSAGE.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborAggregation {
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    /// Per-node scale applied after the segment sum: 1 for `Sum`,
    /// `1/|N(i)|` for `Mean` (isolates get 0; their aggregation is the
    /// empty sum).
    pub scale: Vec<f64>,
    pub n: usize,
}

/// Aggregation plan for a graph under the given neighbor rule.
pub fn neighbor_aggregation(graph: &AttributedGraph, rule: NeighborRule) -> NeighborAggregation {
    neighbor_aggregation_from(graph.n(), |v| graph.neighbors(v), rule)
}

/// Same plan over any adjacency accessor.
pub fn neighbor_aggregation_from<'a, F>(
    n: usize,
    neighbors: F,
    rule: NeighborRule,
) -> NeighborAggregation
where
    F: Fn(usize) -> &'a [usize],
{
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for i in 0..n {
        for &j in neighbors(i) {
            src.push(j);
            dst.push(i);
        }
    }
    let scale = (0..n)
        .map(|i| {
            let deg = neighbors(i).len();
            match rule {
                NeighborRule::Sum => 1.0,
                NeighborRule::Mean => {
                    if deg == 0 {
                        0.0
                    } else {
                        1.0 / deg as f64
                    }
                }
            }
        })
        .collect();
    NeighborAggregation { src, dst, scale, n }
}

fn apply_activation(tape: &mut Tape, x: Var, act: Activation) -> Var {
    match act {
        Activation::Sigmoid => tape.sigmoid(x),
        Activation::Tanh => tape.tanh(x),
        Activation::Relu => tape.relu(x),
        Activation::Identity => x,
    }
}

/// Tape handles for one model's parameters, in [`GnnModel::params`] order.
pub struct ModelVars {
    pub vars: Vec<Var>,
}

/// Declare a leaf per parameter tensor.
pub fn declare_params(tape: &mut Tape, model: &GnnModel) -> ModelVars {
    let vars =
        model.params().iter().map(|t| tape.leaf(t.rows(), t.cols())).collect();
    ModelVars { vars }
}

/// Bindings pairing the declared parameter leaves with the model tensors.
pub fn param_bindings<'m>(model: &'m GnnModel, vars: &ModelVars) -> Vec<(Var, &'m Tensor)> {
    vars.vars.iter().copied().zip(model.params()).collect()
}

/// Structure the forward pass needs besides the features: nothing for an
/// MLP, the normalized adjacency for GCN, the aggregation plan for SAGE.
pub enum GraphContext {
    None,
    Gcn(NormalizedAdjacency),
    Sage(NeighborAggregation),
}

impl GraphContext {
    /// The right context for a model over a graph.
    pub fn for_model(model: &GnnModel, graph: Option<&AttributedGraph>) -> Result<GraphContext> {
        match model.arch {
            Arch::Mlp => Ok(GraphContext::None),
            Arch::Gcn => {
                let g = graph.ok_or(Error::StateError("GCN forward requires a graph"))?;
                Ok(GraphContext::Gcn(normalized_adjacency(g)))
            }
            Arch::Sage => {
                let g = graph.ok_or(Error::StateError("SAGE forward requires a graph"))?;
                Ok(GraphContext::Sage(neighbor_aggregation(g, model.neighbor_rule)))
            }
        }
    }
}

/// Record the model's forward pass on `tape` from the feature node `x`
/// (shape `N x F_0`), returning the embedding node (`N x F_{L+1}`).
///
/// Layer relations:
/// * MLP: `Z' = g(Z W + b)`
/// * GCN: `Z' = g(A_hat Z W + b)` via gather / scale / segment-sum
/// * SAGE: `Z' = g(Z W + w_N(i) * agg(Z) W_neigh + b)`
pub fn build_forward(
    tape: &mut Tape,
    model: &GnnModel,
    params: &ModelVars,
    context: &GraphContext,
    x: Var,
) -> Result<Var> {
    let mut z = x;
    let mut slot = 0usize;
    for (layer, &act) in model.layers.iter().zip(&model.activations) {
        let w = params.vars[slot];
        slot += 1;
        let w_neigh = layer.w_neigh.as_ref().map(|_| {
            let v = params.vars[slot];
            slot += 1;
            v
        });
        let b = params.vars[slot];
        slot += 1;

        let pre = match (model.arch, context) {
            (Arch::Mlp, _) => tape.matmul(z, w)?,
            (Arch::Gcn, GraphContext::Gcn(adj)) => {
                let h = tape.matmul(z, w)?;
                let gathered = tape.row_gather(h, adj.src.clone())?;
                let scaled = tape.row_scale(gathered, adj.coeff.clone())?;
                tape.segment_sum(scaled, adj.dst.clone(), adj.n)?
            }
            (Arch::Sage, GraphContext::Sage(agg)) => {
                let self_term = tape.matmul(z, w)?;
                let gathered = tape.row_gather(z, agg.src.clone())?;
                let summed = tape.segment_sum(gathered, agg.dst.clone(), agg.n)?;
                let weighted = tape.row_scale(summed, agg.scale.clone())?;
                let neigh_term =
                    tape.matmul(weighted, w_neigh.expect("SAGE layer has w_neigh"))?;
                tape.add(self_term, neigh_term)?
            }
            _ => return Err(Error::StateError("graph context does not match architecture")),
        };
        let biased = tape.add_row(pre, b)?;
        z = apply_activation(tape, biased, act);
    }
    Ok(z)
}

/// One-call forward pass: build a tape, bind, run, and return the
/// embedding values.
pub fn forward(model: &GnnModel, graph: Option<&AttributedGraph>, x: &Tensor) -> Result<Tensor> {
    if x.cols() != model.input_dim() {
        return Err(Error::DimensionError(format!(
            "{} feature columns, model expects {}",
            x.cols(),
            model.input_dim()
        )));
    }
    if let Some(g) = graph {
        if g.n() != x.rows() {
            return Err(Error::DimensionError(format!(
                "{} feature rows for {} nodes",
                x.rows(),
                g.n()
            )));
        }
    }
    let context = GraphContext::for_model(model, graph)?;
    let mut tape = Tape::new();
    let x_var = tape.leaf(x.rows(), x.cols());
    let params = declare_params(&mut tape, model);
    let out = build_forward(&mut tape, model, &params, &context, x_var)?;
    let mut bindings = param_bindings(model, &params);
    bindings.push((x_var, x));
    tape.forward(&bindings)?;
    Ok(tape.value(out)?.clone())
}

/// MLP forward: `z' = g(z W + b)` per layer, no graph dependence.
pub fn mlp_forward(model: &GnnModel, x: &Tensor) -> Result<Tensor> {
    if model.arch != Arch::Mlp {
        return Err(Error::StateError("mlp_forward on a non-MLP model"));
    }
    forward(model, None, x)
}

/// GCN forward over a graph.
pub fn gcn_forward(model: &GnnModel, graph: &AttributedGraph, x: &Tensor) -> Result<Tensor> {
    if model.arch != Arch::Gcn {
        return Err(Error::StateError("gcn_forward on a non-GCN model"));
    }
    forward(model, Some(graph), x)
}

/// GraphSAGE forward over a graph.
pub fn sage_forward(model: &GnnModel, graph: &AttributedGraph, x: &Tensor) -> Result<Tensor> {
    if model.arch != Arch::Sage {
        return Err(Error::StateError("sage_forward on a non-SAGE model"));
    }
    forward(model, Some(graph), x)
}
