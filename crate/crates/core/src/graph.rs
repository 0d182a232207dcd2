//! Attributed-graph data model: feature schemas, node tables, edge lists,
//! adjacency indices, permutations, and random-graph initialization.
//!
//! Graphs are undirected and simple. Edges are stored canonically with
//! `src < dst`; the adjacency index holds both directions so neighbor scans
//! are O(deg). Categorical features are stored as level indices against a
//! schema; continuous features as `f64`. A graph is immutable once built —
//! the chains that rewire graphs use [`DynGraph`] and convert back at the
//! end.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kind of a feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical { levels: Vec<String> },
    Continuous { min: f64, max: f64 },
}

/// A named feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// Ordered list of feature columns with validation invariants: unique column
/// names, unique categorical levels, `min <= max` for continuous columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub columns: Vec<ColumnSpec>,
}

impl FeatureSchema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let schema = FeatureSchema { columns };
        schema.validate()?;
        Ok(schema)
    }

    /// Schema with no columns (structure-only graphs).
    pub fn empty() -> Self {
        FeatureSchema::default()
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for col in &self.columns {
            if !names.insert(col.name.as_str()) {
                return Err(Error::SchemaError(format!("duplicate column `{}`", col.name)));
            }
            match &col.kind {
                ColumnKind::Categorical { levels } => {
                    let mut seen = BTreeSet::new();
                    for level in levels {
                        if !seen.insert(level.as_str()) {
                            return Err(Error::SchemaError(format!(
                                "duplicate level `{level}` in column `{}`",
                                col.name
                            )));
                        }
                    }
                    if levels.is_empty() {
                        return Err(Error::SchemaError(format!(
                            "column `{}` has no levels",
                            col.name
                        )));
                    }
                }
                ColumnKind::Continuous { min, max } => {
                    // rejects NaN bounds as well
                    #[allow(clippy::neg_cmp_op_on_partial_ord)]
                    if !(min <= max) {
                        return Err(Error::SchemaError(format!(
                            "column `{}` has min > max",
                            col.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Look up a column by name.
    pub fn column(&self, name: &str) -> Option<(usize, &ColumnSpec)> {
        self.columns.iter().enumerate().find(|(_, c)| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Column storage: categorical values are level indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Categorical(Vec<u32>),
    Continuous(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Categorical(v) => v.len(),
            Column::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Feature table over `n` rows, stored column-wise against a schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTable {
    schema: FeatureSchema,
    columns: Vec<Column>,
    n: usize,
}

impl NodeTable {
    /// Build and validate a table: column count and lengths must match the
    /// schema, every categorical value must be a valid level index, every
    /// continuous value must lie within the schema bounds.
    pub fn new(n: usize, schema: FeatureSchema, columns: Vec<Column>) -> Result<Self> {
        schema.validate()?;
        if columns.len() != schema.columns.len() {
            return Err(Error::SchemaError(format!(
                "expected {} columns, got {}",
                schema.columns.len(),
                columns.len()
            )));
        }
        for (spec, col) in schema.columns.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::SchemaError(format!(
                    "column `{}` has {} rows, table has {n}",
                    spec.name,
                    col.len()
                )));
            }
            match (&spec.kind, col) {
                (ColumnKind::Categorical { levels }, Column::Categorical(vals)) => {
                    for &v in vals {
                        if v as usize >= levels.len() {
                            return Err(Error::SchemaError(format!(
                                "level index {v} out of range in column `{}`",
                                spec.name
                            )));
                        }
                    }
                }
                (ColumnKind::Continuous { min, max }, Column::Continuous(vals)) => {
                    for &v in vals {
                        if !(v >= *min && v <= *max) {
                            return Err(Error::SchemaError(format!(
                                "value {v} outside [{min}, {max}] in column `{}`",
                                spec.name
                            )));
                        }
                    }
                }
                _ => {
                    return Err(Error::SchemaError(format!(
                        "column `{}` storage does not match its schema kind",
                        spec.name
                    )))
                }
            }
        }
        Ok(NodeTable { schema, columns, n })
    }

    /// Structure-only table: `n` rows, zero columns.
    pub fn unattributed(n: usize) -> Self {
        NodeTable { schema: FeatureSchema::empty(), columns: Vec::new(), n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Categorical values of a named column.
    pub fn categorical(&self, name: &str) -> Result<&[u32]> {
        let (idx, spec) = self
            .schema
            .column(name)
            .ok_or_else(|| Error::SchemaError(format!("no column `{name}`")))?;
        match (&spec.kind, &self.columns[idx]) {
            (ColumnKind::Categorical { .. }, Column::Categorical(v)) => Ok(v),
            _ => Err(Error::TypeError(format!("column `{name}` is not categorical"))),
        }
    }

    /// Continuous values of a named column.
    pub fn continuous(&self, name: &str) -> Result<&[f64]> {
        let (idx, spec) = self
            .schema
            .column(name)
            .ok_or_else(|| Error::SchemaError(format!("no column `{name}`")))?;
        match (&spec.kind, &self.columns[idx]) {
            (ColumnKind::Continuous { .. }, Column::Continuous(v)) => Ok(v),
            _ => Err(Error::TypeError(format!("column `{name}` is not continuous"))),
        }
    }

    /// Copy of the rows selected by `rows` (original order preserved).
    pub fn select_rows(&self, rows: &[usize]) -> Result<NodeTable> {
        for &r in rows {
            if r >= self.n {
                return Err(Error::IndexError { index: r, len: self.n });
            }
        }
        let columns = self
            .columns
            .iter()
            .map(|col| match col {
                Column::Categorical(v) => Column::Categorical(rows.iter().map(|&r| v[r]).collect()),
                Column::Continuous(v) => Column::Continuous(rows.iter().map(|&r| v[r]).collect()),
            })
            .collect();
        Ok(NodeTable { schema: self.schema.clone(), columns, n: rows.len() })
    }

    /// Copy of the table with one column's values replaced (used by
    /// imputation). The replacement is validated against the schema.
    pub fn with_column(&self, name: &str, values: Column) -> Result<NodeTable> {
        let (idx, _) = self
            .schema
            .column(name)
            .ok_or_else(|| Error::SchemaError(format!("no column `{name}`")))?;
        let mut columns = self.columns.clone();
        columns[idx] = values;
        NodeTable::new(self.n, self.schema.clone(), columns)
    }
}

/// Edge list with optional per-edge features. Edges are canonical
/// (`src < dst`) and sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeList {
    pub edges: Vec<(usize, usize)>,
    pub feature_schema: Option<FeatureSchema>,
    pub features: Option<Vec<Column>>,
}

impl EdgeList {
    pub fn from_pairs(edges: Vec<(usize, usize)>) -> Self {
        EdgeList { edges, feature_schema: None, features: None }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Undirected simple graph with a node feature table, an edge list, and a
/// redundant per-node sorted adjacency index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributedGraph {
    nodes: NodeTable,
    edges: EdgeList,
    adjacency: Vec<Vec<usize>>,
}

impl AttributedGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn edge_list(&self) -> &EdgeList {
        &self.edges
    }

    /// Canonical sorted edge pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges.edges
    }

    /// Sorted neighbors of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n() || v >= self.n() || u == v {
            return false;
        }
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() { (u, v) } else { (v, u) };
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Index of a canonical edge in the sorted edge list.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let pair = if u < v { (u, v) } else { (v, u) };
        self.edges.edges.binary_search(&pair).ok()
    }
}

/// Number of neighbors of `node`.
pub fn degree(graph: &AttributedGraph, node: usize) -> Result<usize> {
    if node >= graph.n() {
        return Err(Error::IndexError { index: node, len: graph.n() });
    }
    Ok(graph.adjacency[node].len())
}

/// Validate endpoints, canonicalize, sort, and index an edge list into a
/// graph. Self-loops and duplicate unordered pairs are rejected.
pub fn build_graph(nodes: NodeTable, edges: EdgeList) -> Result<AttributedGraph> {
    let n = nodes.len();
    let m = edges.edges.len();
    if let Some(features) = &edges.features {
        let schema = edges
            .feature_schema
            .as_ref()
            .ok_or_else(|| Error::SchemaError("edge features without a schema".into()))?;
        schema.validate()?;
        for col in features {
            if col.len() != m {
                return Err(Error::SchemaError("edge feature length mismatch".into()));
            }
        }
    }

    let mut canonical: Vec<(usize, usize, usize)> = Vec::with_capacity(m);
    for (idx, &(u, v)) in edges.edges.iter().enumerate() {
        if u >= n {
            return Err(Error::IndexError { index: u, len: n });
        }
        if v >= n {
            return Err(Error::IndexError { index: v, len: n });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        canonical.push((a, b, idx));
    }
    canonical.sort_unstable();
    for w in canonical.windows(2) {
        if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
    }

    let order: Vec<usize> = canonical.iter().map(|&(_, _, i)| i).collect();
    let sorted_edges: Vec<(usize, usize)> = canonical.iter().map(|&(a, b, _)| (a, b)).collect();
    let features = edges.features.map(|cols| {
        cols.into_iter()
            .map(|col| match col {
                Column::Categorical(v) => {
                    Column::Categorical(order.iter().map(|&i| v[i]).collect())
                }
                Column::Continuous(v) => Column::Continuous(order.iter().map(|&i| v[i]).collect()),
            })
            .collect()
    });

    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in &sorted_edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    Ok(AttributedGraph {
        nodes,
        edges: EdgeList {
            edges: sorted_edges,
            feature_schema: edges.feature_schema,
            features,
        },
        adjacency,
    })
}

/// A subgraph along with the original id of each of its nodes:
/// `node_ids[new_id] == original_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphView {
    pub node_ids: Vec<usize>,
    pub graph: AttributedGraph,
}

/// Induced subgraph on a strictly increasing node id list (new id `i`
/// corresponds to `node_ids[i]`). Edge features are carried over.
pub fn induced_subgraph(graph: &AttributedGraph, node_ids: &[usize]) -> Result<AttributedGraph> {
    let mut relabel = BTreeMap::new();
    for (new, &old) in node_ids.iter().enumerate() {
        if old >= graph.n() {
            return Err(Error::IndexError { index: old, len: graph.n() });
        }
        if new > 0 && node_ids[new - 1] >= old {
            return Err(Error::ValueError("node ids must be strictly increasing".into()));
        }
        relabel.insert(old, new);
    }
    let nodes = graph.nodes.select_rows(node_ids)?;

    let mut pairs = Vec::new();
    let mut source_idx = Vec::new();
    for &u in node_ids {
        for &v in graph.neighbors(u) {
            if v > u {
                if let Some(&rv) = relabel.get(&v) {
                    let ru = relabel[&u];
                    pairs.push((ru, rv));
                    if graph.edges.features.is_some() {
                        source_idx.push(graph.edge_index(u, v).expect("indexed edge"));
                    }
                }
            }
        }
    }
    let features = graph.edges.features.as_ref().map(|cols| {
        cols.iter()
            .map(|col| match col {
                Column::Categorical(v) => {
                    Column::Categorical(source_idx.iter().map(|&i| v[i]).collect())
                }
                Column::Continuous(v) => {
                    Column::Continuous(source_idx.iter().map(|&i| v[i]).collect())
                }
            })
            .collect()
    });
    build_graph(
        nodes,
        EdgeList { edges: pairs, feature_schema: graph.edges.feature_schema.clone(), features },
    )
}

/// Induced subgraph on all nodes at distance `<= k` from `root`, with the
/// original node ids preserved in the relabel map.
pub fn neighborhood_subgraph(
    graph: &AttributedGraph,
    root: usize,
    k: usize,
) -> Result<SubgraphView> {
    if root >= graph.n() {
        return Err(Error::IndexError { index: root, len: graph.n() });
    }
    let mut dist: BTreeMap<usize, usize> = BTreeMap::new();
    dist.insert(root, 0);
    let mut frontier = vec![root];
    for d in 1..=k {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in graph.neighbors(u) {
                if let alloc::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                    e.insert(d);
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let node_ids: Vec<usize> = dist.keys().copied().collect();
    let sub = induced_subgraph(graph, &node_ids)?;
    Ok(SubgraphView { node_ids, graph: sub })
}

/// A checked bijection on `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n {
                return Err(Error::ValueError(format!("permutation image {v} out of range")));
            }
            if seen[v] {
                return Err(Error::ValueError(format!("permutation image {v} repeated")));
            }
            seen[v] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { mapping: (0..n).collect() }
    }

    /// Uniformly random permutation, deterministic for a given seed.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            mapping.swap(i, j);
        }
        Permutation { mapping }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &p) in self.mapping.iter().enumerate() {
            inv[p] = i;
        }
        Permutation { mapping: inv }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Image of node `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }
}

/// Relabel nodes by a permutation: node row `i` moves to row `pi(i)` and
/// every edge `(i, j)` becomes `(pi(i), pi(j))`. The result is isomorphic to
/// the input.
pub fn apply_permutation(graph: &AttributedGraph, perm: &Permutation) -> Result<AttributedGraph> {
    if perm.len() != graph.n() {
        return Err(Error::DimensionError(format!(
            "permutation length {} != node count {}",
            perm.len(),
            graph.n()
        )));
    }
    let inv = perm.inverse();
    // row pi(i) of the new table is row i of the old one
    let order: Vec<usize> = (0..graph.n()).map(|new| inv.apply(new)).collect();
    let nodes = graph.nodes.select_rows(&order)?;
    let edges: Vec<(usize, usize)> =
        graph.edges().iter().map(|&(u, v)| (perm.apply(u), perm.apply(v))).collect();
    build_graph(
        nodes,
        EdgeList {
            edges,
            feature_schema: graph.edges.feature_schema.clone(),
            features: graph.edges.features.clone(),
        },
    )
}

fn pair_capacity(n: usize) -> u64 {
    let n = n as u64;
    n * (n - 1) / 2
}

/// Offset of the first pair `(u, *)` in the canonical pair enumeration.
fn pair_offset(n: u64, u: u64) -> u64 {
    u * (2 * n - u - 1) / 2
}

/// Decode a canonical pair index `k` in `[0, n(n-1)/2)` to `(u, v)`, `u < v`.
fn decode_pair(n: usize, k: u64) -> (usize, usize) {
    let nf = n as f64;
    let kf = k as f64;
    let disc = (nf - 0.5) * (nf - 0.5) - 2.0 * kf;
    let mut u = (nf - 0.5 - crate::math::sqrt(disc.max(0.0))) as u64;
    let n64 = n as u64;
    u = u.min(n64.saturating_sub(2));
    while u + 1 < n64 && pair_offset(n64, u + 1) <= k {
        u += 1;
    }
    while pair_offset(n64, u) > k {
        u -= 1;
    }
    let v = u + 1 + (k - pair_offset(n64, u));
    (u as usize, v as usize)
}

/// G(n, m): exactly `m` distinct edges sampled uniformly without replacement
/// from all unordered pairs. Deterministic for a given seed. Nodes carry an
/// empty feature table.
pub fn erdos_renyi_gnm(n: usize, m: usize, seed: u64) -> Result<AttributedGraph> {
    erdos_renyi_gnm_with_nodes(NodeTable::unattributed(n), m, seed)
}

/// G(n, m) over an existing node table.
pub fn erdos_renyi_gnm_with_nodes(
    nodes: NodeTable,
    m: usize,
    seed: u64,
) -> Result<AttributedGraph> {
    let n = nodes.len();
    let cap = if n < 2 { 0 } else { pair_capacity(n) };
    if m as u64 > cap {
        return Err(Error::CapacityError(format!(
            "{m} edges requested, {cap} unordered pairs available"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Floyd's algorithm: uniform m-subset of pair indices.
    let mut chosen: BTreeSet<u64> = BTreeSet::new();
    for j in (cap - m as u64)..cap {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let edges: Vec<(usize, usize)> = chosen.into_iter().map(|k| decode_pair(n, k)).collect();
    build_graph(nodes, EdgeList::from_pairs(edges))
}

/// Mutable adjacency structure used by the rewiring and MCMC chains.
/// Maintains sorted neighbor lists, an edge vector supporting O(1) uniform
/// choice, and an edge-position index.
#[derive(Debug, Clone)]
pub struct DynGraph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    positions: BTreeMap<(usize, usize), usize>,
}

impl DynGraph {
    pub fn new(n: usize) -> Self {
        DynGraph { adjacency: vec![Vec::new(); n], edges: Vec::new(), positions: BTreeMap::new() }
    }

    pub fn from_graph(graph: &AttributedGraph) -> Self {
        let mut dyn_graph = DynGraph::new(graph.n());
        for &(u, v) in graph.edges() {
            dyn_graph.add_edge(u, v);
        }
        dyn_graph
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let pair = if u < v { (u, v) } else { (v, u) };
        self.positions.contains_key(&pair)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Insert a canonical edge; returns false if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v);
        let pair = if u < v { (u, v) } else { (v, u) };
        if self.positions.contains_key(&pair) {
            return false;
        }
        self.positions.insert(pair, self.edges.len());
        self.edges.push(pair);
        let pos_v = self.adjacency[pair.0].binary_search(&pair.1).unwrap_err();
        self.adjacency[pair.0].insert(pos_v, pair.1);
        let pos_u = self.adjacency[pair.1].binary_search(&pair.0).unwrap_err();
        self.adjacency[pair.1].insert(pos_u, pair.0);
        true
    }

    /// Remove an edge; returns false if it was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let pair = if u < v { (u, v) } else { (v, u) };
        let Some(idx) = self.positions.remove(&pair) else {
            return false;
        };
        let last = self.edges.len() - 1;
        self.edges.swap_remove(idx);
        if idx != last {
            let moved = self.edges[idx];
            self.positions.insert(moved, idx);
        }
        if let Ok(p) = self.adjacency[pair.0].binary_search(&pair.1) {
            self.adjacency[pair.0].remove(p);
        }
        if let Ok(p) = self.adjacency[pair.1].binary_search(&pair.0) {
            self.adjacency[pair.1].remove(p);
        }
        true
    }

    /// Uniformly chosen existing edge.
    pub fn random_edge<R: Rng>(&self, rng: &mut R) -> Option<(usize, usize)> {
        if self.edges.is_empty() {
            None
        } else {
            Some(self.edges[rng.random_range(0..self.edges.len())])
        }
    }

    /// Convert back to an immutable graph over the given node table.
    pub fn into_graph(self, nodes: NodeTable) -> Result<AttributedGraph> {
        build_graph(nodes, EdgeList::from_pairs(self.edges))
    }
}
