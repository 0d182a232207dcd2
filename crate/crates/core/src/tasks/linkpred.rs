//! Graph-auto-encoder link prediction: an encoder produces node embeddings
//! `Z` and the probability of an edge is `sigma(alpha <z_i, z_j> + beta)`
//! with trainable scalars `alpha`, `beta`. Training balances observed
//! (positive) edges against uniformly sampled negative pairs; the optional
//! fusion regularizer pulls the model's differentiable mixing matrix
//! toward a target.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Adam, AdamConfig, Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::gnn::{
    build_forward, declare_params, init_model, param_bindings, Activation, Arch, GnnModel,
    GraphContext,
};
use crate::graph::{build_graph, AttributedGraph, ColumnKind, EdgeList};
use crate::math;
use crate::sample::{random_walk_batch, split_edges};

use super::encode::{encode_features, fit_encoding, InputEncoding};
use super::metrics::{auc_rank, average_precision, roc_points};
use super::EvalReport;

/// Epsilon floor inside the regularizer's logarithm.
pub const MIXING_LOG_FLOOR: f64 = 1e-12;

/// A trained link predictor: encoder, decoder scalars, and the input
/// encoding the encoder was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaeModel {
    pub encoder: GnnModel,
    pub alpha: f64,
    pub beta: f64,
    pub encoding: InputEncoding,
}

impl GaeModel {
    /// Node embeddings for a graph under this model.
    pub fn embeddings(&self, graph: &AttributedGraph) -> Result<Tensor> {
        let x = encode_features(graph.nodes(), &self.encoding)?;
        let graph_arg = match self.encoder.arch {
            Arch::Mlp => None,
            _ => Some(graph),
        };
        crate::gnn::forward(&self.encoder, graph_arg, &x)
    }
}

/// `sigma(alpha <z_i, z_j> + beta)`.
pub fn decode_edge_prob(zi: &[f64], zj: &[f64], alpha: f64, beta: f64) -> Result<f64> {
    if zi.len() != zj.len() {
        return Err(Error::DimensionError(format!(
            "embedding lengths {} and {}",
            zi.len(),
            zj.len()
        )));
    }
    let dot: f64 = zi.iter().zip(zj).map(|(a, b)| a * b).sum();
    Ok(math::sigmoid(alpha * dot + beta))
}

fn pair_logit(z: &Tensor, pair: (usize, usize), alpha: f64, beta: f64) -> f64 {
    let dot: f64 = z.row(pair.0).iter().zip(z.row(pair.1)).map(|(a, b)| a * b).sum();
    alpha * dot + beta
}

fn check_pairs(z: &Tensor, pairs: &[(usize, usize)]) -> Result<()> {
    for &(i, j) in pairs {
        if i >= z.rows() {
            return Err(Error::IndexError { index: i, len: z.rows() });
        }
        if j >= z.rows() {
            return Err(Error::IndexError { index: j, len: z.rows() });
        }
    }
    Ok(())
}

/// Mean binary cross-entropy over positive pairs (target 1) and negative
/// pairs (target 0).
pub fn gae_loss(
    z: &Tensor,
    positives: &[(usize, usize)],
    negatives: &[(usize, usize)],
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::ValueError("positive and negative edge lists must be nonempty".into()));
    }
    check_pairs(z, positives)?;
    check_pairs(z, negatives)?;
    let mut total = 0.0;
    for &pair in positives {
        total += math::softplus(-pair_logit(z, pair, alpha, beta));
    }
    for &pair in negatives {
        total += math::softplus(pair_logit(z, pair, alpha, beta));
    }
    Ok(total / (positives.len() + negatives.len()) as f64)
}

/// How the all-pairs sums behind the model mixing matrix are evaluated:
/// exactly up to `full_pair_cap` nodes, otherwise on `sample_pairs`
/// uniformly drawn pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingEstimateConfig {
    pub full_pair_cap: usize,
    pub sample_pairs: usize,
    pub seed: u64,
}

impl Default for MixingEstimateConfig {
    fn default() -> Self {
        MixingEstimateConfig { full_pair_cap: 2000, sample_pairs: 1_000_000, seed: 0 }
    }
}

fn mixing_pairs(n: usize, config: &MixingEstimateConfig) -> Vec<(usize, usize)> {
    if n <= config.full_pair_cap {
        let mut pairs = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        pairs
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut pairs = Vec::with_capacity(config.sample_pairs);
        while pairs.len() < config.sample_pairs {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            pairs.push(if i < j { (i, j) } else { (j, i) });
        }
        pairs
    }
}

/// The model's differentiable joint mixing matrix over a categorical node
/// attribute: cell `(a, b)` (upper-triangular, `a <= b`) is the
/// probability mass the decoder assigns to pairs with endpoint labels
/// `{a, b}`, normalized by the mass over all pairs. The fold over the two
/// orderings makes the upper-triangular total exactly 1.
pub fn model_mixing_matrix(
    z: &Tensor,
    alpha: f64,
    beta: f64,
    labels: &[u32],
    levels: usize,
    config: &MixingEstimateConfig,
) -> Result<Vec<Vec<f64>>> {
    if labels.len() != z.rows() {
        return Err(Error::DimensionError(format!(
            "{} labels for {} embedding rows",
            labels.len(),
            z.rows()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&v| v as usize >= levels) {
        return Err(Error::ValueError(format!("label {bad} outside {levels} levels")));
    }
    if z.rows() < 2 {
        return Err(Error::InsufficientData);
    }
    let pairs = mixing_pairs(z.rows(), config);
    let mut cells = alloc::vec![alloc::vec![0.0f64; levels]; levels];
    let mut total = 0.0f64;
    for &(i, j) in &pairs {
        let p = math::sigmoid(pair_logit(z, (i, j), alpha, beta));
        let (a, b) = {
            let (a, b) = (labels[i] as usize, labels[j] as usize);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        cells[a][b] += p;
        total += p;
    }
    for row in &mut cells {
        for cell in row.iter_mut() {
            *cell /= total;
        }
    }
    Ok(cells)
}

/// Cross-entropy of a target joint mixing matrix against the model's:
/// `- sum_ab target_ab ln max(model_ab, floor)`. Both matrices use the
/// upper-triangular convention.
pub fn mixing_cross_entropy(target: &[Vec<f64>], model: &[Vec<f64>]) -> f64 {
    let mut ce = 0.0;
    for (trow, mrow) in target.iter().zip(model) {
        for (&t, &m) in trow.iter().zip(mrow) {
            if t > 0.0 {
                ce -= t * math::ln(m.max(MIXING_LOG_FLOOR));
            }
        }
    }
    ce
}

/// The link-prediction loss with the mixing-matrix regularizer:
/// `gae_loss - lambda * sum_ab target_ab ln model_ab`. With `lambda == 0`
/// this returns exactly [`gae_loss`].
#[allow(clippy::too_many_arguments)]
pub fn regularized_gae_loss(
    z: &Tensor,
    positives: &[(usize, usize)],
    negatives: &[(usize, usize)],
    alpha: f64,
    beta: f64,
    target: &[Vec<f64>],
    lambda: f64,
    labels: &[u32],
    config: &MixingEstimateConfig,
) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::ValueError(format!("lambda {lambda} must be nonnegative")));
    }
    let base = gae_loss(z, positives, negatives, alpha, beta)?;
    if lambda == 0.0 {
        return Ok(base);
    }
    let levels = target.len();
    let model = model_mixing_matrix(z, alpha, beta, labels, levels, config)?;
    Ok(base + lambda * mixing_cross_entropy(target, &model))
}

/// Record pair logits `alpha <z_i, z_j> + beta` on the tape, one row per
/// pair.
fn build_pair_logits(
    tape: &mut Tape,
    z: Var,
    pairs: &[(usize, usize)],
    alpha: Var,
    beta: Var,
) -> Result<Var> {
    let idx_i: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let idx_j: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let zi = tape.row_gather(z, idx_i)?;
    let zj = tape.row_gather(z, idx_j)?;
    let prod = tape.mul(zi, zj)?;
    let dots = tape.row_sum(prod);
    let scaled = tape.mul_scalar_var(dots, alpha)?;
    tape.add_scalar_var(scaled, beta)
}

/// Mean BCE from positive and negative logit columns.
fn build_bce(tape: &mut Tape, pos_logits: Var, neg_logits: Var, count: usize) -> Result<Var> {
    let neg_pos = tape.scale(pos_logits, -1.0);
    let pos_term = tape.softplus(neg_pos);
    let neg_term = tape.softplus(neg_logits);
    let sum_pos = tape.sum(pos_term);
    let sum_neg = tape.sum(neg_term);
    let total = tape.add(sum_pos, sum_neg)?;
    Ok(tape.scale(total, 1.0 / count as f64))
}

/// Record the regularizer `-sum_ab target_ab ln cell_ab` over the given
/// evaluation pairs.
fn build_mixing_regularizer(
    tape: &mut Tape,
    z: Var,
    pairs: &[(usize, usize)],
    labels: &[u32],
    target: &[Vec<f64>],
    alpha: Var,
    beta: Var,
) -> Result<Var> {
    let logits = build_pair_logits(tape, z, pairs, alpha, beta)?;
    let probs = tape.sigmoid(logits);
    let total = tape.sum(probs);
    let levels = target.len();
    let mut reg: Option<Var> = None;
    for (a, target_row) in target.iter().enumerate().take(levels) {
        for (b, &weight) in target_row.iter().enumerate().take(levels).skip(a) {
            if weight <= 0.0 {
                continue;
            }
            let mask: Vec<f64> = pairs
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = (labels[i] as usize, labels[j] as usize);
                    let (x, y) = if x <= y { (x, y) } else { (y, x) };
                    if (x, y) == (a, b) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let mask_const = tape.constant(Tensor::new(pairs.len(), 1, mask)?);
            let masked = tape.mul(probs, mask_const)?;
            let cell_mass = tape.sum(masked);
            let cell = tape.div(cell_mass, total)?;
            let log_cell = tape.log_floor(cell, MIXING_LOG_FLOOR);
            let weighted = tape.scale(log_cell, -weight);
            reg = Some(match reg {
                Some(acc) => tape.add(acc, weighted)?,
                None => weighted,
            });
        }
    }
    reg.ok_or_else(|| Error::ValueError("target mixing matrix has no positive mass".into()))
}

/// Per-epoch training metrics (on the epoch's batch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaeEpoch {
    pub loss: f64,
    pub auc: f64,
    pub average_precision: f64,
}

/// Training configuration for [`train_gae`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainGaeConfig {
    pub arch: Arch,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub edge_split_frac: f64,
    pub negatives_per_positive: usize,
    pub walk_roots: usize,
    pub walk_length: usize,
    /// Regularizer strength; 0 disables the regularizer entirely.
    pub lambda: f64,
    /// Categorical attribute whose mixing is regularized.
    pub mixing_attribute: Option<String>,
    /// Target joint mixing matrix (upper-triangular convention).
    pub target_mixing: Option<Vec<Vec<f64>>>,
    /// Pairs used per batch to estimate the model mixing matrix.
    pub mixing_pairs_per_batch: usize,
    pub seed: u64,
}

impl Default for TrainGaeConfig {
    fn default() -> Self {
        TrainGaeConfig {
            arch: Arch::Sage,
            hidden_dims: alloc::vec![64],
            output_dim: 16,
            epochs: 200,
            learning_rate: 1e-2,
            edge_split_frac: 0.5,
            negatives_per_positive: 1,
            walk_roots: 512,
            walk_length: 3,
            lambda: 0.0,
            mixing_attribute: None,
            target_mixing: None,
            mixing_pairs_per_batch: 10_000,
            seed: 0,
        }
    }
}

/// Uniform non-edges among the batch nodes (checked against the full
/// graph's edge set).
fn batch_negatives(
    batch_ids: &[usize],
    full_graph: &AttributedGraph,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let n = batch_ids.len();
    let mut chosen = alloc::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let max_attempts = count.saturating_mul(200).max(1000);
    while out.len() < count && attempts < max_attempts {
        attempts += 1;
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let pair = if i < j { (i, j) } else { (j, i) };
        if full_graph.has_edge(batch_ids[pair.0], batch_ids[pair.1]) || !chosen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    out
}

/// Train a GAE link predictor. Edges are split into train/test; walks,
/// positives, and the encoder forward all use the train graph only.
/// Returns the model and the per-epoch batch metrics.
pub fn train_gae(
    graph: &AttributedGraph,
    config: &TrainGaeConfig,
) -> Result<(GaeModel, Vec<GaeEpoch>)> {
    if graph.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    let split = split_edges(graph, config.edge_split_frac, config.seed)?;
    let train_graph = build_graph(
        graph.nodes().clone(),
        EdgeList::from_pairs(split.train_edges.clone()),
    )?;
    let all_rows: Vec<usize> = (0..graph.n()).collect();
    let encoding = fit_encoding(graph.nodes(), None, Some(&all_rows))?;

    let mut dims = alloc::vec![encoding.width()];
    dims.extend_from_slice(&config.hidden_dims);
    dims.push(config.output_dim);
    let mut activations = alloc::vec![Activation::Relu; dims.len() - 2];
    activations.push(Activation::Identity);
    let mut encoder = init_model(config.arch, &dims, &activations, config.seed)?;
    let mut alpha = Tensor::scalar(1.0);
    let mut beta = Tensor::scalar(0.0);

    let mut shapes = encoder.param_shapes();
    shapes.push((1, 1));
    shapes.push((1, 1));
    let mut adam = Adam::new(AdamConfig::with_learning_rate(config.learning_rate), &shapes)?;

    // regularizer inputs
    let mixing_labels: Option<(Vec<u32>, Vec<Vec<f64>>)> = if config.lambda > 0.0 {
        let attribute = config
            .mixing_attribute
            .as_ref()
            .ok_or_else(|| Error::ValueError("lambda > 0 needs a mixing attribute".into()))?;
        let target = config
            .target_mixing
            .as_ref()
            .ok_or_else(|| Error::ValueError("lambda > 0 needs a target mixing matrix".into()))?;
        let (_, spec) = graph
            .nodes()
            .schema()
            .column(attribute)
            .ok_or_else(|| Error::SchemaError(format!("no column `{attribute}`")))?;
        let ColumnKind::Categorical { levels } = &spec.kind else {
            return Err(Error::TypeError(format!("column `{attribute}` is not categorical")));
        };
        if target.len() != levels.len() {
            return Err(Error::DimensionError(format!(
                "target mixing is {}x{}, attribute has {} levels",
                target.len(),
                target.first().map_or(0, Vec::len),
                levels.len()
            )));
        }
        Some((graph.nodes().categorical(attribute)?.to_vec(), target.clone()))
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xa076_1d64_78bd_642f);
    let mut curve = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        // a usable batch has at least one train edge
        let mut batch = None;
        for retry in 0..8u64 {
            let candidate = random_walk_batch(
                &train_graph,
                config.walk_roots,
                config.walk_length,
                config
                    .seed
                    .wrapping_add((epoch as u64) << 8)
                    .wrapping_add(retry)
                    .wrapping_mul(0x9e37_79b9_7f4a_7c15),
            )?;
            if candidate.graph.m() > 0 {
                batch = Some(candidate);
                break;
            }
        }
        let batch =
            batch.ok_or_else(|| Error::ValueError("walk batches contain no train edges".into()))?;

        let positives: Vec<(usize, usize)> = batch.graph.edges().to_vec();
        let want = positives.len() * config.negatives_per_positive.max(1);
        let negatives = batch_negatives(&batch.node_ids, graph, want, &mut rng);
        if negatives.is_empty() {
            continue;
        }

        let x = encode_features(batch.graph.nodes(), &encoding)?;
        let graph_arg = match config.arch {
            Arch::Mlp => None,
            _ => Some(&batch.graph),
        };
        let context = GraphContext::for_model(&encoder, graph_arg)?;
        let mut tape = Tape::new();
        let x_var = tape.leaf(x.rows(), x.cols());
        let params = declare_params(&mut tape, &encoder);
        let alpha_var = tape.leaf(1, 1);
        let beta_var = tape.leaf(1, 1);
        let z = build_forward(&mut tape, &encoder, &params, &context, x_var)?;
        let pos_logits = build_pair_logits(&mut tape, z, &positives, alpha_var, beta_var)?;
        let neg_logits = build_pair_logits(&mut tape, z, &negatives, alpha_var, beta_var)?;
        let bce = build_bce(&mut tape, pos_logits, neg_logits, positives.len() + negatives.len())?;
        let loss = match &mixing_labels {
            Some((labels, target)) => {
                let batch_labels: Vec<u32> =
                    batch.node_ids.iter().map(|&orig| labels[orig]).collect();
                let reg_pairs = mixing_pairs(
                    batch.node_ids.len(),
                    &MixingEstimateConfig {
                        full_pair_cap: {
                            // all pairs while they fit in the per-batch budget
                            let n = batch.node_ids.len();
                            if n * n.saturating_sub(1) / 2 <= config.mixing_pairs_per_batch {
                                n
                            } else {
                                0
                            }
                        },
                        sample_pairs: config.mixing_pairs_per_batch,
                        seed: rng.random(),
                    },
                );
                let reg = build_mixing_regularizer(
                    &mut tape,
                    z,
                    &reg_pairs,
                    &batch_labels,
                    target,
                    alpha_var,
                    beta_var,
                )?;
                let scaled = tape.scale(reg, config.lambda);
                tape.add(bce, scaled)?
            }
            None => bce,
        };

        let mut bindings = param_bindings(&encoder, &params);
        bindings.push((x_var, &x));
        bindings.push((alpha_var, &alpha));
        bindings.push((beta_var, &beta));
        tape.forward(&bindings)?;
        tape.backward(loss, None)?;

        let loss_value = tape.value(loss)?.item()?;
        let pos_scores: Vec<f64> =
            tape.value(pos_logits)?.data().iter().map(|&s| math::sigmoid(s)).collect();
        let neg_scores: Vec<f64> =
            tape.value(neg_logits)?.data().iter().map(|&s| math::sigmoid(s)).collect();
        curve.push(GaeEpoch {
            loss: loss_value,
            auc: auc_rank(&pos_scores, &neg_scores),
            average_precision: average_precision(&pos_scores, &neg_scores),
        });

        let mut grads: Vec<Tensor> = Vec::with_capacity(params.vars.len() + 2);
        for (&v, model_param) in params.vars.iter().zip(encoder.params()) {
            grads.push(
                tape.grad(v)
                    .cloned()
                    .unwrap_or_else(|| Tensor::zeros(model_param.rows(), model_param.cols())),
            );
        }
        grads.push(tape.grad(alpha_var).cloned().unwrap_or_else(|| Tensor::zeros(1, 1)));
        grads.push(tape.grad(beta_var).cloned().unwrap_or_else(|| Tensor::zeros(1, 1)));
        let grad_refs: Vec<&Tensor> = grads.iter().collect();
        let mut param_refs = encoder.params_mut();
        param_refs.push(&mut alpha);
        param_refs.push(&mut beta);
        adam.step(&mut param_refs, &grad_refs)?;
    }

    let model = GaeModel {
        encoder,
        alpha: alpha.get(0, 0),
        beta: beta.get(0, 0),
        encoding,
    };
    Ok((model, curve))
}

/// Score held-out positives and negatives with embeddings computed on
/// `graph` (typically the training graph). Returns AUC (rank statistic),
/// average precision, ROC points, and a 20-bin probability histogram.
pub fn evaluate_link_predictor(
    model: &GaeModel,
    graph: &AttributedGraph,
    test_positives: &[(usize, usize)],
    test_negatives: &[(usize, usize)],
) -> Result<EvalReport> {
    let z = model.embeddings(graph)?;
    check_pairs(&z, test_positives)?;
    check_pairs(&z, test_negatives)?;
    let loss = gae_loss(&z, test_positives, test_negatives, model.alpha, model.beta)?;
    let score = |pairs: &[(usize, usize)]| -> Vec<f64> {
        pairs
            .iter()
            .map(|&p| math::sigmoid(pair_logit(&z, p, model.alpha, model.beta)))
            .collect()
    };
    let pos_scores = score(test_positives);
    let neg_scores = score(test_negatives);
    let mut histogram = alloc::vec![0usize; 20];
    for &p in pos_scores.iter().chain(&neg_scores) {
        let bin = ((p * 20.0) as usize).min(19);
        histogram[bin] += 1;
    }
    Ok(EvalReport {
        loss,
        accuracy: None,
        auc: Some(auc_rank(&pos_scores, &neg_scores)),
        average_precision: Some(average_precision(&pos_scores, &neg_scores)),
        roc: roc_points(&pos_scores, &neg_scores),
        probability_histogram: histogram,
    })
}
