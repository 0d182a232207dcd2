//! Node classification: training, prediction, evaluation, and attribute
//! imputation.
//!
//! The target column is excluded from the inputs. Train-test edges are
//! discarded on both sides: training runs on the train-node induced
//! subgraph, evaluation on the test-node induced subgraph. GNN variants
//! train on random-walk mini-batch subgraphs; the MLP trains on plain row
//! mini-batches.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Adam, AdamConfig, Tape, Tensor};
use crate::error::{Error, Result};
use crate::gnn::{
    build_forward, declare_params, init_model, param_bindings, Activation, Arch, GnnModel,
    GraphContext,
};
use crate::graph::{AttributedGraph, Column, ColumnKind, NodeTable};
use crate::math;
use crate::sample::{random_walk_batch, split_nodes};

use super::encode::{encode_features, fit_encoding, InputEncoding};
use super::EvalReport;

/// A trained node classifier: encoder with `C` output units, the target
/// column it predicts, and the input encoding fitted on the train split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub encoder: GnnModel,
    pub target: String,
    pub encoding: InputEncoding,
    pub class_labels: Vec<String>,
}

/// Training configuration for [`train_classifier`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainClassifierConfig {
    pub arch: Arch,
    pub hidden_dims: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Node fraction reserved for training.
    pub train_frac: f64,
    pub split_seed: u64,
    /// Random-walk batch parameters (GNN variants).
    pub walk_roots: usize,
    pub walk_length: usize,
    /// Row mini-batch size (MLP variant).
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainClassifierConfig {
    fn default() -> Self {
        TrainClassifierConfig {
            arch: Arch::Sage,
            hidden_dims: alloc::vec![32, 32],
            epochs: 100,
            learning_rate: 1e-2,
            train_frac: 0.8,
            split_seed: 0,
            walk_roots: 512,
            walk_length: 3,
            batch_size: 256,
            seed: 0,
        }
    }
}

fn target_levels(graph: &AttributedGraph, target: &str) -> Result<Vec<String>> {
    let (_, spec) = graph
        .nodes()
        .schema()
        .column(target)
        .ok_or_else(|| Error::SchemaError(format!("no column `{target}`")))?;
    match &spec.kind {
        ColumnKind::Categorical { levels } => Ok(levels.clone()),
        ColumnKind::Continuous { .. } => {
            Err(Error::TypeError(format!("target `{target}` is not categorical")))
        }
    }
}

fn one_hot_labels(values: &[u32], classes: usize) -> Tensor {
    let mut y = Tensor::zeros(values.len(), classes);
    for (row, &v) in values.iter().enumerate() {
        y.set(row, v as usize, 1.0);
    }
    y
}

/// Class probabilities for the given nodes: softmax over the encoder
/// output, one row per requested node, each summing to 1.
pub fn predict_class_proba(
    model: &ClassifierModel,
    graph: &AttributedGraph,
    nodes: &[usize],
) -> Result<Tensor> {
    for &v in nodes {
        if v >= graph.n() {
            return Err(Error::IndexError { index: v, len: graph.n() });
        }
    }
    let x = encode_features(graph.nodes(), &model.encoding)?;
    let graph_arg = match model.encoder.arch {
        Arch::Mlp => None,
        _ => Some(graph),
    };
    let context = GraphContext::for_model(&model.encoder, graph_arg)?;
    let mut tape = Tape::new();
    let x_var = tape.leaf(x.rows(), x.cols());
    let params = declare_params(&mut tape, &model.encoder);
    let logits = build_forward(&mut tape, &model.encoder, &params, &context, x_var)?;
    let proba = tape.softmax_rows(logits);
    let mut bindings = param_bindings(&model.encoder, &params);
    bindings.push((x_var, &x));
    tape.forward(&bindings)?;
    let full = tape.value(proba)?;
    let mut out = Tensor::zeros(nodes.len(), full.cols());
    for (r, &v) in nodes.iter().enumerate() {
        for c in 0..full.cols() {
            out.set(r, c, full.get(v, c));
        }
    }
    Ok(out)
}

/// Cross-entropy `-sum_{i in set} sum_c y_ic ln P_ic` over rows of a
/// probability matrix. Every selected row must sum to 1 and the labels
/// must be one-hot.
pub fn classification_loss(proba: &Tensor, labels: &Tensor, node_set: &[usize]) -> Result<f64> {
    if proba.shape() != labels.shape() {
        return Err(Error::DimensionError(format!(
            "probabilities {}x{}, labels {}x{}",
            proba.rows(),
            proba.cols(),
            labels.rows(),
            labels.cols()
        )));
    }
    let mut loss = 0.0;
    for &i in node_set {
        if i >= proba.rows() {
            return Err(Error::IndexError { index: i, len: proba.rows() });
        }
        let row_sum: f64 = proba.row(i).iter().sum();
        if (row_sum - 1.0).abs() > 1e-6 {
            return Err(Error::ValueError(format!("probability row {i} sums to {row_sum}")));
        }
        let label_sum: f64 = labels.row(i).iter().sum();
        if (label_sum - 1.0).abs() > 1e-12 {
            return Err(Error::ValueError(format!("label row {i} is not one-hot")));
        }
        for c in 0..proba.cols() {
            let y = labels.get(i, c);
            if y > 0.0 {
                loss -= y * math::ln(proba.get(i, c));
            }
        }
    }
    Ok(loss)
}

/// One optimization step over a (sub)graph batch; returns the mean
/// per-node loss.
#[allow(clippy::too_many_arguments)]
fn train_step(
    model: &mut GnnModel,
    adam: &mut Adam,
    graph: Option<&AttributedGraph>,
    x: &Tensor,
    labels: &Tensor,
) -> Result<f64> {
    let context = GraphContext::for_model(model, graph)?;
    let mut tape = Tape::new();
    let x_var = tape.leaf(x.rows(), x.cols());
    let params = declare_params(&mut tape, model);
    let logits = build_forward(&mut tape, model, &params, &context, x_var)?;
    let log_proba = tape.log_softmax_rows(logits);
    let y = tape.constant(labels.clone());
    let picked = tape.mul(log_proba, y)?;
    let total = tape.sum(picked);
    let loss = tape.scale(total, -1.0 / x.rows() as f64);
    let mut bindings = param_bindings(model, &params);
    bindings.push((x_var, x));
    tape.forward(&bindings)?;
    tape.backward(loss, None)?;
    let loss_value = tape.value(loss)?.item()?;
    let grads: Vec<Tensor> = params
        .vars
        .iter()
        .map(|&v| tape.grad(v).cloned().unwrap_or_else(|| {
            let (r, c) = tape.value(v).map(|t| t.shape()).unwrap_or((1, 1));
            Tensor::zeros(r, c)
        }))
        .collect();
    let grad_refs: Vec<&Tensor> = grads.iter().collect();
    let mut param_refs = model.params_mut();
    adam.step(&mut param_refs, &grad_refs)?;
    Ok(loss_value)
}

/// Train a classifier for a categorical target. Returns the model and the
/// per-epoch mean training loss.
pub fn train_classifier(
    graph: &AttributedGraph,
    target: &str,
    config: &TrainClassifierConfig,
) -> Result<(ClassifierModel, Vec<f64>)> {
    let class_labels = target_levels(graph, target)?;
    let classes = class_labels.len();
    if classes < 2 {
        return Err(Error::ValueError(format!("target `{target}` has {classes} level(s)")));
    }
    let split = split_nodes(graph, config.train_frac, config.split_seed)?;
    let train_graph = crate::graph::induced_subgraph(graph, &split.train_nodes)?;
    let encoding = fit_encoding(graph.nodes(), Some(target), Some(&split.train_nodes))?;

    let mut dims = alloc::vec![encoding.width()];
    dims.extend_from_slice(&config.hidden_dims);
    dims.push(classes);
    let mut activations = alloc::vec![Activation::Relu; dims.len() - 2];
    activations.push(Activation::Identity);
    let mut encoder = init_model(config.arch, &dims, &activations, config.seed)?;
    let mut adam =
        Adam::new(AdamConfig::with_learning_rate(config.learning_rate), &encoder.param_shapes())?;

    let train_x = encode_features(train_graph.nodes(), &encoding)?;
    let train_labels = train_graph.nodes().categorical(target)?.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut curve = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let loss = match config.arch {
            Arch::Mlp => {
                // plain row mini-batches
                let n = train_graph.n();
                let mut order: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    let j = rng.random_range(0..=i);
                    order.swap(i, j);
                }
                let mut total = 0.0;
                let mut batches = 0usize;
                for chunk in order.chunks(config.batch_size.max(1)) {
                    let mut x = Tensor::zeros(chunk.len(), train_x.cols());
                    for (r, &node) in chunk.iter().enumerate() {
                        for c in 0..train_x.cols() {
                            x.set(r, c, train_x.get(node, c));
                        }
                    }
                    let values: Vec<u32> = chunk.iter().map(|&v| train_labels[v]).collect();
                    let y = one_hot_labels(&values, classes);
                    total += train_step(&mut encoder, &mut adam, None, &x, &y)?;
                    batches += 1;
                }
                total / batches.max(1) as f64
            }
            Arch::Gcn | Arch::Sage => {
                let batch = random_walk_batch(
                    &train_graph,
                    config.walk_roots,
                    config.walk_length,
                    config.seed.wrapping_add(epoch as u64).wrapping_mul(0x2545_f491_4f6c_dd1d),
                )?;
                let x = encode_features(batch.graph.nodes(), &encoding)?;
                let values = batch.graph.nodes().categorical(target)?;
                let y = one_hot_labels(values, classes);
                train_step(&mut encoder, &mut adam, Some(&batch.graph), &x, &y)?
            }
        };
        curve.push(loss);
    }

    Ok((
        ClassifierModel { encoder, target: target.to_string(), encoding, class_labels },
        curve,
    ))
}

/// Evaluate on the given nodes of a graph whose target column holds the
/// true labels. Returns the summed cross-entropy as `loss` and the argmax
/// accuracy.
pub fn evaluate_classifier(
    model: &ClassifierModel,
    graph: &AttributedGraph,
    nodes: &[usize],
) -> Result<EvalReport> {
    if nodes.is_empty() {
        return Err(Error::EmptyData);
    }
    let proba = predict_class_proba(model, graph, nodes)?;
    let truth = graph.nodes().categorical(&model.target)?;
    let values: Vec<u32> = nodes.iter().map(|&v| truth[v]).collect();
    let labels = one_hot_labels(&values, model.class_labels.len());
    let all_rows: Vec<usize> = (0..nodes.len()).collect();
    let loss = classification_loss(&proba, &labels, &all_rows)?;
    let mut correct = 0usize;
    for (r, &v) in values.iter().enumerate() {
        let row = proba.row(r);
        let argmax = row
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &x)| {
                if x > bv {
                    (i, x)
                } else {
                    (bi, bv)
                }
            })
            .0;
        if argmax == v as usize {
            correct += 1;
        }
    }
    Ok(EvalReport {
        loss,
        accuracy: Some(correct as f64 / nodes.len() as f64),
        auc: None,
        average_precision: None,
        roc: Vec::new(),
        probability_histogram: Vec::new(),
    })
}

/// Fill the target column for the `missing` nodes with the argmax class
/// (ties break toward the lowest level index, which argmax-by-strict-max
/// already guarantees). Other rows are untouched.
pub fn impute_node_attribute(
    model: &ClassifierModel,
    graph: &AttributedGraph,
    missing: &[usize],
) -> Result<NodeTable> {
    let mut values = graph.nodes().categorical(&model.target)?.to_vec();
    if missing.is_empty() {
        return Ok(graph.nodes().clone());
    }
    let proba = predict_class_proba(model, graph, missing)?;
    for (r, &node) in missing.iter().enumerate() {
        let row = proba.row(r);
        let mut best = 0usize;
        let mut best_p = f64::NEG_INFINITY;
        for (c, &p) in row.iter().enumerate() {
            if p > best_p {
                best = c;
                best_p = p;
            }
        }
        values[node] = best as u32;
    }
    graph.nodes().with_column(&model.target, Column::Categorical(values))
}
