//! Graph sampling: node and edge train-test splits, random-walk
//! mini-batches, negative-edge sampling, and star/neighborhood/snowball
//! subgraph samples.
//!
//! Every sampler takes an explicit seed and is deterministic for it. All
//! returned subgraphs carry the original node ids in a relabel map
//! (`node_ids[new] == old`).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::graph::{induced_subgraph, AttributedGraph, EdgeList};

/// Random node partition with the resulting edge-class tally.
///
/// Splitting nodes classifies edges into train-train, train-test, and
/// test-test; train-test edges are discarded by the training pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSplit {
    pub train_nodes: Vec<usize>,
    pub test_nodes: Vec<usize>,
    /// (train-train, train-test, test-test) edge counts.
    pub edge_class_counts: (usize, usize, usize),
    /// The same three classes as fractions of M (zeros when M = 0).
    pub edge_class_fractions: (f64, f64, f64),
}

/// Random edge partition; all nodes remain visible to both phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSplit {
    pub train_edges: Vec<(usize, usize)>,
    pub test_edges: Vec<(usize, usize)>,
}

/// What rule produced a subgraph sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// Seeds plus neighbors, keeping only edges incident to a seed.
    Star,
    /// Seeds plus neighbors with the full induced edge set.
    Neighborhood,
    /// Wave-by-wave frontier expansion with the full induced edge set.
    Snowball,
    /// Union of nodes visited by random walks, full induced edge set.
    RandomWalk,
}

/// A sampled subgraph with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphSample {
    pub kind: SampleKind,
    /// Original id of each subgraph node: `node_ids[new] == old`. Sorted.
    pub node_ids: Vec<usize>,
    pub graph: AttributedGraph,
    /// Seeds (or walk roots) in original ids.
    pub seeds: Vec<usize>,
    /// Nodes added per wave (snowball only; empty otherwise). Sums to
    /// `node_ids.len()`.
    pub wave_sizes: Vec<usize>,
    /// Wave index per subgraph node, aligned with `node_ids` (snowball
    /// only; empty otherwise).
    pub wave_index: Vec<usize>,
}

fn check_nodes_in_range(graph: &AttributedGraph, nodes: &[usize]) -> Result<()> {
    for &v in nodes {
        if v >= graph.n() {
            return Err(Error::IndexError { index: v, len: graph.n() });
        }
    }
    Ok(())
}

fn shuffled_indices(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Uniform random node partition into train/test with the edge classes
/// tallied. `train_frac` must lie strictly in (0, 1); the train set holds
/// `round(train_frac * N)` nodes.
pub fn split_nodes(graph: &AttributedGraph, train_frac: f64, seed: u64) -> Result<NodeSplit> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::ValueError(format!("train_frac {train_frac} outside (0, 1)")));
    }
    let n = graph.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled_indices(n, &mut rng);
    let n_train = (((train_frac * n as f64) + 0.5) as usize).min(n);
    let mut train_nodes: Vec<usize> = order[..n_train].to_vec();
    let mut test_nodes: Vec<usize> = order[n_train..].to_vec();
    train_nodes.sort_unstable();
    test_nodes.sort_unstable();

    let mut in_train = alloc::vec![false; n];
    for &v in &train_nodes {
        in_train[v] = true;
    }
    let mut counts = (0usize, 0usize, 0usize);
    for &(u, v) in graph.edges() {
        match (in_train[u], in_train[v]) {
            (true, true) => counts.0 += 1,
            (false, false) => counts.2 += 1,
            _ => counts.1 += 1,
        }
    }
    let m = graph.m();
    let fractions = if m == 0 {
        (0.0, 0.0, 0.0)
    } else {
        (counts.0 as f64 / m as f64, counts.1 as f64 / m as f64, counts.2 as f64 / m as f64)
    };
    Ok(NodeSplit {
        train_nodes,
        test_nodes,
        edge_class_counts: counts,
        edge_class_fractions: fractions,
    })
}

/// Uniform random edge partition; the train side holds
/// `round(train_frac * M)` edges. Both lists come back sorted.
pub fn split_edges(graph: &AttributedGraph, train_frac: f64, seed: u64) -> Result<EdgeSplit> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::ValueError(format!("train_frac {train_frac} outside (0, 1)")));
    }
    let m = graph.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled_indices(m, &mut rng);
    let n_train = (((train_frac * m as f64) + 0.5) as usize).min(m);
    let mut train_edges: Vec<(usize, usize)> =
        order[..n_train].iter().map(|&i| graph.edges()[i]).collect();
    let mut test_edges: Vec<(usize, usize)> =
        order[n_train..].iter().map(|&i| graph.edges()[i]).collect();
    train_edges.sort_unstable();
    test_edges.sort_unstable();
    Ok(EdgeSplit { train_edges, test_edges })
}

/// One simple random walk per uniformly chosen root; the batch is the union
/// of visited nodes with its induced subgraph. Isolated roots stay put.
pub fn random_walk_batch(
    graph: &AttributedGraph,
    num_roots: usize,
    walk_length: usize,
    seed: u64,
) -> Result<SubgraphSample> {
    if graph.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited: BTreeSet<usize> = BTreeSet::new();
    let mut seeds = Vec::with_capacity(num_roots);
    for _ in 0..num_roots {
        let root = rng.random_range(0..graph.n());
        seeds.push(root);
        let mut current = root;
        visited.insert(current);
        for _ in 0..walk_length {
            let neighbors = graph.neighbors(current);
            if neighbors.is_empty() {
                break;
            }
            current = neighbors[rng.random_range(0..neighbors.len())];
            visited.insert(current);
        }
    }
    let node_ids: Vec<usize> = visited.into_iter().collect();
    let sub = induced_subgraph(graph, &node_ids)?;
    Ok(SubgraphSample {
        kind: SampleKind::RandomWalk,
        node_ids,
        graph: sub,
        seeds,
        wave_sizes: Vec::new(),
        wave_index: Vec::new(),
    })
}

/// Number of unordered non-edges of `graph` that are also outside
/// `exclude`.
fn non_edge_capacity(graph: &AttributedGraph, exclude: &BTreeSet<(usize, usize)>) -> u64 {
    let n = graph.n() as u64;
    let total_pairs = n * n.saturating_sub(1) / 2;
    let excluded_non_edges = exclude.iter().filter(|&&(u, v)| !graph.has_edge(u, v)).count() as u64;
    total_pairs - graph.m() as u64 - excluded_non_edges
}

/// Uniformly sampled unordered node pairs that are neither edges of `graph`
/// nor in `exclude`; no duplicates. Rejection sampling backs off to full
/// enumeration when the free pairs are scarce.
pub fn sample_negative_edges(
    graph: &AttributedGraph,
    count: usize,
    seed: u64,
    exclude: &[(usize, usize)],
) -> Result<Vec<(usize, usize)>> {
    let n = graph.n();
    let excluded: BTreeSet<(usize, usize)> = exclude
        .iter()
        .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
        .filter(|&(u, v)| u != v)
        .collect();
    let capacity = if n < 2 { 0 } else { non_edge_capacity(graph, &excluded) };
    if count as u64 > capacity {
        return Err(Error::CapacityError(format!(
            "{count} negative edges requested, only {capacity} available"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // rejection is near-O(1) while free pairs are plentiful
    if (count as u64) * 4 <= capacity {
        let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v {
                continue;
            }
            let pair = if u < v { (u, v) } else { (v, u) };
            if graph.has_edge(pair.0, pair.1) || excluded.contains(&pair) || !chosen.insert(pair) {
                continue;
            }
            out.push(pair);
        }
        Ok(out)
    } else {
        // dense case: enumerate the free pairs and take a uniform subset
        let mut free: Vec<(usize, usize)> = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if !graph.has_edge(u, v) && !excluded.contains(&(u, v)) {
                    free.push((u, v));
                }
            }
        }
        for i in 0..count {
            let j = rng.random_range(i..free.len());
            free.swap(i, j);
        }
        free.truncate(count);
        Ok(free)
    }
}

/// Seeds plus their neighbors, keeping only seed-incident edges (the
/// alter-alter ties are dropped).
pub fn star_sample(graph: &AttributedGraph, seeds: &[usize]) -> Result<SubgraphSample> {
    check_nodes_in_range(graph, seeds)?;
    let seed_set: BTreeSet<usize> = seeds.iter().copied().collect();
    let mut nodes: BTreeSet<usize> = seed_set.clone();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &s in &seed_set {
        for &v in graph.neighbors(s) {
            nodes.insert(v);
            edges.insert(if s < v { (s, v) } else { (v, s) });
        }
    }
    let node_ids: Vec<usize> = nodes.into_iter().collect();
    let relabel: alloc::collections::BTreeMap<usize, usize> =
        node_ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let table = graph.nodes().select_rows(&node_ids)?;
    let pairs: Vec<(usize, usize)> =
        edges.into_iter().map(|(u, v)| (relabel[&u], relabel[&v])).collect();
    let sub = build_graph(table, EdgeList::from_pairs(pairs))?;
    Ok(SubgraphSample {
        kind: SampleKind::Star,
        node_ids,
        graph: sub,
        seeds: seed_set.into_iter().collect(),
        wave_sizes: Vec::new(),
        wave_index: Vec::new(),
    })
}

/// Seeds plus their neighbors with the full induced edge set (alter-alter
/// ties included).
pub fn neighborhood_sample(graph: &AttributedGraph, seeds: &[usize]) -> Result<SubgraphSample> {
    check_nodes_in_range(graph, seeds)?;
    let seed_set: BTreeSet<usize> = seeds.iter().copied().collect();
    let mut nodes: BTreeSet<usize> = seed_set.clone();
    for &s in &seed_set {
        nodes.extend(graph.neighbors(s).iter().copied());
    }
    let node_ids: Vec<usize> = nodes.into_iter().collect();
    let sub = induced_subgraph(graph, &node_ids)?;
    Ok(SubgraphSample {
        kind: SampleKind::Neighborhood,
        node_ids,
        graph: sub,
        seeds: seed_set.into_iter().collect(),
        wave_sizes: Vec::new(),
        wave_index: Vec::new(),
    })
}

/// Wave-by-wave expansion: wave 0 is the seed set, wave w the not yet
/// sampled neighbors of wave w-1. Returns the induced subgraph with
/// per-wave sizes and per-node wave indices.
pub fn snowball_sample(
    graph: &AttributedGraph,
    seeds: &[usize],
    waves: usize,
) -> Result<SubgraphSample> {
    check_nodes_in_range(graph, seeds)?;
    let seed_set: BTreeSet<usize> = seeds.iter().copied().collect();
    let mut wave_of: alloc::collections::BTreeMap<usize, usize> =
        seed_set.iter().map(|&s| (s, 0)).collect();
    let mut frontier: Vec<usize> = seed_set.iter().copied().collect();
    let mut wave_sizes = alloc::vec![seed_set.len()];
    for wave in 1..=waves {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in graph.neighbors(u) {
                if let alloc::collections::btree_map::Entry::Vacant(e) = wave_of.entry(v) {
                    e.insert(wave);
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        wave_sizes.push(next.len());
        frontier = next;
    }
    let node_ids: Vec<usize> = wave_of.keys().copied().collect();
    let wave_index: Vec<usize> = node_ids.iter().map(|id| wave_of[id]).collect();
    let sub = induced_subgraph(graph, &node_ids)?;
    Ok(SubgraphSample {
        kind: SampleKind::Snowball,
        node_ids,
        graph: sub,
        seeds: seed_set.into_iter().collect(),
        wave_sizes,
        wave_index,
    })
}
