//! Graph generation by iterated link prediction: an edge-count-targeted
//! Markov chain that rewires a random initial graph until the edge pattern
//! agrees with a trained link predictor.
//!
//! Each iteration recomputes the node embeddings, then either proposes a
//! batch of additions (when below the target edge count, accepting each
//! candidate pair with its decoded probability) or a batch of deletions
//! (when at or above target, accepting with one minus the probability).
//! The alternation keeps the edge count within one batch of the target.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::gnn::{
    build_forward, declare_params, neighbor_aggregation_from, normalized_adjacency_from,
    param_bindings, Arch, GraphContext,
};
use crate::graph::{AttributedGraph, DynGraph, NodeTable};
use crate::math;
use crate::tasks::{encode_features, GaeModel};

/// Chain parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Number of iterations `T`.
    pub iterations: usize,
    /// Proposals per iteration.
    pub batch_size: usize,
    /// Target edge count `M`.
    pub target_edges: usize,
    /// Recompute embeddings every this many iterations (1 = every
    /// iteration, the default and the faithful schedule).
    pub refresh_every: usize,
    /// Record the full edge list after every iteration. Only honored on
    /// tiny graphs (at most [`STATE_RECORDING_CAP`] nodes); supports the
    /// chain-occupancy oracles.
    pub record_states: bool,
    pub seed: u64,
}

/// Node-count ceiling for [`ChainConfig::record_states`].
pub const STATE_RECORDING_CAP: usize = 30;

impl ChainConfig {
    pub fn new(iterations: usize, batch_size: usize, target_edges: usize, seed: u64) -> Self {
        ChainConfig {
            iterations,
            batch_size,
            target_edges,
            refresh_every: 1,
            record_states: false,
            seed,
        }
    }
}

/// Whether an iteration proposed additions or deletions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Add,
    Delete,
}

/// One iteration's record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub iteration: usize,
    pub kind: StepKind,
    pub proposals: usize,
    pub accepts: usize,
    pub edges_after: usize,
}

/// Full chain trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainHistory {
    pub target_edges: usize,
    pub batch_size: usize,
    pub initial_edges: usize,
    pub records: Vec<ChainRecord>,
    /// Sorted edge list after each iteration, present only when state
    /// recording was requested on a small enough graph.
    pub states: Option<Vec<Vec<(usize, usize)>>>,
}

/// Edge target preserving a reference graph's edge/node ratio:
/// `round(n_gen * M_ref / N_ref)`.
pub fn target_edge_count(n_gen: usize, n_ref: usize, m_ref: usize) -> Result<usize> {
    if n_ref == 0 {
        return Err(Error::ValueError("reference node count is zero".into()));
    }
    Ok(math::round(n_gen as f64 * m_ref as f64 / n_ref as f64) as usize)
}

/// Embeddings of the chain's current graph under the model.
fn chain_embeddings(gae: &GaeModel, graph: &DynGraph, x: &Tensor) -> Result<Tensor> {
    let model = &gae.encoder;
    let context = match model.arch {
        Arch::Mlp => GraphContext::None,
        Arch::Gcn => GraphContext::Gcn(normalized_adjacency_from(graph.n(), |v| graph.neighbors(v))),
        Arch::Sage => GraphContext::Sage(neighbor_aggregation_from(
            graph.n(),
            |v| graph.neighbors(v),
            model.neighbor_rule,
        )),
    };
    let mut tape = crate::autodiff::Tape::new();
    let x_var = tape.leaf(x.rows(), x.cols());
    let params = declare_params(&mut tape, model);
    let out = build_forward(&mut tape, model, &params, &context, x_var)?;
    let mut bindings = param_bindings(model, &params);
    bindings.push((x_var, x));
    tape.forward(&bindings)?;
    Ok(tape.value(out)?.clone())
}

fn pair_probability(z: &Tensor, pair: (usize, usize), alpha: f64, beta: f64) -> f64 {
    let dot: f64 = z.row(pair.0).iter().zip(z.row(pair.1)).map(|(a, b)| a * b).sum();
    math::sigmoid(alpha * dot + beta)
}

/// Up to `count` distinct non-edges, uniform over the free pairs.
fn sample_non_edges(
    graph: &DynGraph,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let n = graph.n();
    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    let free = total_pairs - graph.m() as u64;
    let count = count.min(free as usize);
    if count == 0 {
        return Vec::new();
    }
    let mut chosen = alloc::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    if free <= 4 * count as u64 {
        // scarce free pairs: enumerate and partially shuffle
        let mut pool: Vec<(usize, usize)> = Vec::with_capacity(free as usize);
        for u in 0..n {
            for v in (u + 1)..n {
                if !graph.has_edge(u, v) {
                    pool.push((u, v));
                }
            }
        }
        for i in 0..count {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(count);
        return pool;
    }
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let pair = if u < v { (u, v) } else { (v, u) };
        if graph.has_edge(pair.0, pair.1) || !chosen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    out
}

/// Up to `count` distinct existing edges, uniform without replacement.
fn sample_edges(graph: &DynGraph, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let m = graph.m();
    let count = count.min(m);
    // Floyd's algorithm over edge indices
    let mut chosen = alloc::collections::BTreeSet::new();
    for j in (m - count)..m {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().map(|idx| graph.edges()[idx]).collect()
}

/// Run the rewiring chain over a generated population. The initial graph
/// is G(n, M) for the configured target M; the node table is never
/// mutated. Returns the final graph and the per-iteration history.
pub fn generate_graph(
    node_table: &NodeTable,
    gae: &GaeModel,
    config: &ChainConfig,
) -> Result<(AttributedGraph, ChainHistory)> {
    let n = node_table.len();
    if config.batch_size == 0 {
        return Err(Error::ValueError("batch size must be at least 1".into()));
    }
    let capacity = if n < 2 { 0 } else { n as u64 * (n as u64 - 1) / 2 };
    if config.target_edges as u64 > capacity {
        return Err(Error::CapacityError(format!(
            "target of {} edges exceeds the {capacity} unordered pairs",
            config.target_edges
        )));
    }
    // schema compatibility is what encoding enforces
    let x = encode_features(node_table, &gae.encoding)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init_seed: u64 = rng.random();
    let init = crate::graph::erdos_renyi_gnm_with_nodes(
        node_table.clone(),
        config.target_edges,
        init_seed,
    )?;
    let initial_edges = init.m();
    let mut graph = DynGraph::from_graph(&init);

    let refresh_every = config.refresh_every.max(1);
    let mut records = Vec::with_capacity(config.iterations);
    let record_states = config.record_states && n <= STATE_RECORDING_CAP;
    let mut states: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut embeddings: Option<Tensor> = None;
    for iteration in 1..=config.iterations {
        if embeddings.is_none() || (iteration - 1) % refresh_every == 0 {
            embeddings = Some(chain_embeddings(gae, &graph, &x)?);
        }
        let z = embeddings.as_ref().expect("embeddings just refreshed");

        if graph.m() < config.target_edges {
            let candidates = sample_non_edges(&graph, config.batch_size, &mut rng);
            let mut accepts = 0usize;
            for &pair in &candidates {
                let p = pair_probability(z, pair, gae.alpha, gae.beta);
                if rng.random::<f64>() < p {
                    graph.add_edge(pair.0, pair.1);
                    accepts += 1;
                }
            }
            records.push(ChainRecord {
                iteration,
                kind: StepKind::Add,
                proposals: candidates.len(),
                accepts,
                edges_after: graph.m(),
            });
        } else {
            let candidates = sample_edges(&graph, config.batch_size, &mut rng);
            let mut accepts = 0usize;
            for &pair in &candidates {
                let p = pair_probability(z, pair, gae.alpha, gae.beta);
                if rng.random::<f64>() < 1.0 - p {
                    graph.remove_edge(pair.0, pair.1);
                    accepts += 1;
                }
            }
            records.push(ChainRecord {
                iteration,
                kind: StepKind::Delete,
                proposals: candidates.len(),
                accepts,
                edges_after: graph.m(),
            });
        }
        if record_states {
            let mut edges = graph.edges().to_vec();
            edges.sort_unstable();
            states.push(edges);
        }
    }

    let final_graph = graph.into_graph(node_table.clone())?;
    Ok((
        final_graph,
        ChainHistory {
            target_edges: config.target_edges,
            batch_size: config.batch_size,
            initial_edges,
            records,
            states: record_states.then_some(states),
        },
    ))
}

/// Aggregated chain diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub mean_edges: f64,
    pub add_steps: usize,
    pub delete_steps: usize,
    /// Accepted / proposed over all add (respectively delete) steps; 0
    /// when no such step ran.
    pub add_accept_ratio: f64,
    pub delete_accept_ratio: f64,
    /// Set when, after the burn-in fraction (0.2), the edge count drifted
    /// more than two batch sizes from the target.
    pub drift_flag: bool,
}

/// Summarize a chain history.
pub fn chain_diagnostics(history: &ChainHistory) -> Result<ChainDiagnostics> {
    if history.records.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut add_proposals = 0usize;
    let mut add_accepts = 0usize;
    let mut delete_proposals = 0usize;
    let mut delete_accepts = 0usize;
    let mut add_steps = 0usize;
    let mut delete_steps = 0usize;
    let mut edge_sum = 0.0f64;
    for rec in &history.records {
        edge_sum += rec.edges_after as f64;
        match rec.kind {
            StepKind::Add => {
                add_steps += 1;
                add_proposals += rec.proposals;
                add_accepts += rec.accepts;
            }
            StepKind::Delete => {
                delete_steps += 1;
                delete_proposals += rec.proposals;
                delete_accepts += rec.accepts;
            }
        }
    }
    let burn_in = (history.records.len() as f64 * 0.2) as usize;
    let tolerance = 2 * history.batch_size;
    let drift_flag = history.records[burn_in..].iter().any(|rec| {
        let drift = rec.edges_after.abs_diff(history.target_edges);
        drift > tolerance
    });
    Ok(ChainDiagnostics {
        mean_edges: edge_sum / history.records.len() as f64,
        add_steps,
        delete_steps,
        add_accept_ratio: if add_proposals == 0 {
            0.0
        } else {
            add_accepts as f64 / add_proposals as f64
        },
        delete_accept_ratio: if delete_proposals == 0 {
            0.0
        } else {
            delete_accepts as f64 / delete_proposals as f64
        },
        drift_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{init_model, Activation};
    use crate::graph::{Column, ColumnKind, ColumnSpec, FeatureSchema};
    use crate::tasks::{fit_encoding, InputEncoding};
    use alloc::vec;

    /// A decoder with constant edge probability p: zero encoder output,
    /// beta = logit(p).
    fn constant_decoder(table: &NodeTable, p: f64) -> GaeModel {
        let encoding: InputEncoding = fit_encoding(table, None, None).unwrap();
        let width = encoding.width().max(1);
        let mut encoder =
            init_model(Arch::Mlp, &[width, 2], &[Activation::Identity], 0).unwrap();
        for param in encoder.params_mut() {
            for v in param.data_mut() {
                *v = 0.0;
            }
        }
        GaeModel { encoder, alpha: 1.0, beta: math::logit(p), encoding }
    }

    fn tiny_table(n: usize) -> NodeTable {
        let schema = FeatureSchema::new(vec![ColumnSpec {
            name: "x".into(),
            kind: ColumnKind::Continuous { min: 0.0, max: 1.0 },
        }])
        .unwrap();
        let values: Vec<f64> = (0..n).map(|i| i as f64 / n.max(1) as f64).collect();
        NodeTable::new(n, schema, vec![Column::Continuous(values)]).unwrap()
    }

    #[test]
    fn target_edge_count_cases() {
        assert_eq!(target_edge_count(100, 100, 640).unwrap(), 640);
        assert_eq!(target_edge_count(10, 10, 123).unwrap(), 123);
        // ratio 12.3
        assert_eq!(target_edge_count(10, 1000, 12_300).unwrap(), 123);
        assert!(matches!(target_edge_count(5, 0, 1), Err(Error::ValueError(_))));

        // the reference-scale target
        let t = target_edge_count(100_000, 1_575_861, 19_481_626).unwrap();
        assert!(
            (t as i64 - 1_236_242).abs() <= 20,
            "target {t} should sit within 20 of 1,236,242"
        );
    }

    #[test]
    fn zero_iterations_returns_er_initialization() {
        let table = tiny_table(10);
        let gae = constant_decoder(&table, 0.5);
        let config = ChainConfig::new(0, 3, 12, 99);
        let (graph, history) = generate_graph(&table, &gae, &config).unwrap();
        assert_eq!(graph.m(), 12);
        assert!(history.records.is_empty());
        assert_eq!(history.initial_edges, 12);
        // and it equals the ER draw for the derived seed
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let init_seed: u64 = rng.random();
        let er = crate::graph::erdos_renyi_gnm_with_nodes(table.clone(), 12, init_seed).unwrap();
        assert_eq!(graph, er);
    }

    #[test]
    fn chain_is_deterministic_and_preserves_the_table() {
        let table = tiny_table(12);
        let gae = constant_decoder(&table, 0.4);
        let config = ChainConfig::new(50, 4, 20, 7);
        let (g1, h1) = generate_graph(&table, &gae, &config).unwrap();
        let (g2, h2) = generate_graph(&table, &gae, &config).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(h1, h2);
        assert_eq!(g1.nodes(), &table, "node attributes never mutate");
    }

    #[test]
    fn edge_count_stays_within_one_batch_of_target() {
        let table = tiny_table(15);
        let gae = constant_decoder(&table, 0.5);
        let m = 30usize;
        let n_batch = 5usize;
        let config = ChainConfig::new(400, n_batch, m, 3);
        let (_, history) = generate_graph(&table, &gae, &config).unwrap();
        for rec in &history.records {
            assert!(
                rec.edges_after >= m - n_batch && rec.edges_after <= m + n_batch,
                "iteration {}: {} edges",
                rec.iteration,
                rec.edges_after
            );
            // the record's delta is consistent with its accepts
            assert!(rec.accepts <= rec.proposals);
        }
    }

    #[test]
    fn constant_decoder_accept_ratios() {
        let p = 0.3;
        let table = tiny_table(30);
        let gae = constant_decoder(&table, p);
        let config = ChainConfig::new(3000, 6, 60, 11);
        let (_, history) = generate_graph(&table, &gae, &config).unwrap();
        let diag = chain_diagnostics(&history).unwrap();
        assert!((diag.add_accept_ratio - p).abs() < 0.03, "add ratio {}", diag.add_accept_ratio);
        assert!(
            (diag.delete_accept_ratio - (1.0 - p)).abs() < 0.03,
            "delete ratio {}",
            diag.delete_accept_ratio
        );
        assert!(diag.add_steps + diag.delete_steps == 3000);
        assert!(!diag.drift_flag);
    }

    #[test]
    fn diagnostics_aggregate_matches_direct_tally() {
        // synthetic history
        let history = ChainHistory {
            target_edges: 10,
            batch_size: 2,
            initial_edges: 10,
            states: None,
            records: vec![
                ChainRecord {
                    iteration: 1,
                    kind: StepKind::Delete,
                    proposals: 2,
                    accepts: 1,
                    edges_after: 9,
                },
                ChainRecord {
                    iteration: 2,
                    kind: StepKind::Add,
                    proposals: 2,
                    accepts: 2,
                    edges_after: 11,
                },
                ChainRecord {
                    iteration: 3,
                    kind: StepKind::Delete,
                    proposals: 2,
                    accepts: 0,
                    edges_after: 11,
                },
            ],
        };
        let diag = chain_diagnostics(&history).unwrap();
        assert_eq!(diag.add_steps, 1);
        assert_eq!(diag.delete_steps, 2);
        assert!((diag.add_accept_ratio - 1.0).abs() < 1e-15);
        assert!((diag.delete_accept_ratio - 0.25).abs() < 1e-15);
        assert!((diag.mean_edges - 31.0 / 3.0).abs() < 1e-12);
        assert!(!diag.drift_flag);
        assert!(matches!(
            chain_diagnostics(&ChainHistory {
                target_edges: 0,
                batch_size: 1,
                initial_edges: 0,
                states: None,
                records: vec![]
            }),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn zero_acceptance_keeps_edges_constant() {
        // probability ~1 means deletions (the only proposals at M) are
        // never accepted
        let table = tiny_table(8);
        let gae = constant_decoder(&table, 1.0 - 1e-12);
        let config = ChainConfig::new(50, 3, 10, 21);
        let (graph, history) = generate_graph(&table, &gae, &config).unwrap();
        assert_eq!(graph.m(), 10);
        for rec in &history.records {
            assert_eq!(rec.edges_after, 10);
            assert_eq!(rec.accepts, 0);
        }
    }

    #[test]
    fn three_node_single_edge_occupancy_is_uniform() {
        // constant decoder, M = 1, batch 1: the chain wanders over the
        // three single-edge graphs; occupancy must be uniform. Oracle: the
        // exact stationary distribution of the 4-state chain (enumerated
        // by symmetry) is uniform over the three single-edge states.
        let table = tiny_table(3);
        let gae = constant_decoder(&table, 0.5);
        let config = ChainConfig::new(30_000, 1, 1, 123);
        let (_, history) = generate_graph(&table, &gae, &config).unwrap();
        // reconstruct per-iteration occupancy by replay
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let init_seed: u64 = rng.random();
        let er = crate::graph::erdos_renyi_gnm_with_nodes(table.clone(), 1, init_seed).unwrap();
        let mut graph = DynGraph::from_graph(&er);
        let x = encode_features(&table, &gae.encoding).unwrap();
        let mut counts = alloc::collections::BTreeMap::new();
        for rec in &history.records {
            // replay the iteration
            let z = chain_embeddings(&gae, &graph, &x).unwrap();
            if graph.m() < 1 {
                let candidates = sample_non_edges(&graph, 1, &mut rng);
                for &pair in &candidates {
                    let p = pair_probability(&z, pair, gae.alpha, gae.beta);
                    if rng.random::<f64>() < p {
                        graph.add_edge(pair.0, pair.1);
                    }
                }
            } else {
                let candidates = sample_edges(&graph, 1, &mut rng);
                for &pair in &candidates {
                    let p = pair_probability(&z, pair, gae.alpha, gae.beta);
                    if rng.random::<f64>() < 1.0 - p {
                        graph.remove_edge(pair.0, pair.1);
                    }
                }
            }
            assert_eq!(graph.m(), rec.edges_after, "replay diverged");
            if graph.m() == 1 {
                *counts.entry(graph.edges()[0]).or_insert(0usize) += 1;
            }
        }
        let total: usize = counts.values().sum();
        assert_eq!(counts.len(), 3, "all three single-edge states visited");
        for (&pair, &c) in &counts {
            let frac = c as f64 / total as f64;
            assert!(
                (frac - 1.0 / 3.0).abs() < 0.02,
                "state {pair:?} occupancy {frac}"
            );
        }
    }

    #[test]
    fn capacity_and_batch_validation() {
        let table = tiny_table(4);
        let gae = constant_decoder(&table, 0.5);
        assert!(matches!(
            generate_graph(&table, &gae, &ChainConfig::new(1, 1, 7, 0)),
            Err(Error::CapacityError(_))
        ));
        assert!(matches!(
            generate_graph(&table, &gae, &ChainConfig::new(1, 0, 2, 0)),
            Err(Error::ValueError(_))
        ));
    }
}
