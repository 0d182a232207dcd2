//! Exponential random graph models: the term system with sufficient and
//! change statistics, maximum pseudo-likelihood estimation, MCMC simulation
//! with toggle and fixed-density proposals, and degree goodness-of-fit.
//!
//! A model over graphs is `P(G) ~ exp(theta . f(G))` where `f` stacks the
//! terms of an [`ErgmSpec`]. Change statistics (the difference in `f` from
//! toggling one dyad) are computed locally from neighbor intersections,
//! never by recomputing `f`.

mod fit;
mod mcmc;

pub use fit::{mple_fit, mple_fit_masked, snowball_dyad_mask, ErgmFit, MpleConfig};
pub use mcmc::{gof_degree, mcmc_sample, GofConfig, GofReport, McmcConfig, McmcRun, Proposal, StatTrace};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, ColumnKind, DynGraph, NodeTable};
use crate::math;

/// One ERGM term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// Edge count `M`.
    Edges,
    /// `sum over edges of (x_i + x_j)` for a numeric (or two-level
    /// categorical, encoded 0/1) attribute.
    NodeCov(String),
    /// Number of edges whose endpoints share the categorical value.
    NodeMatch(String),
    /// Number of edges with exactly `k` shared partners.
    Esp(usize),
    /// Geometrically weighted edgewise shared partners with decay `tau`:
    /// `e^tau * sum_k (1 - (1 - e^-tau)^k) * EP_k`.
    Gwesp(f64),
}

/// Ordered, validated term list defining the feature map `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgmSpec {
    pub terms: Vec<TermKind>,
}

impl ErgmSpec {
    pub fn new(terms: Vec<TermKind>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::ValueError("a model needs at least one term".into()));
        }
        let edge_terms = terms.iter().filter(|t| matches!(t, TermKind::Edges)).count();
        if edge_terms > 1 {
            return Err(Error::ValueError("at most one edge-count term".into()));
        }
        for term in &terms {
            if let TermKind::Gwesp(tau) = term {
                // rejects NaN as well
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(*tau > 0.0) {
                    return Err(Error::ValueError(format!("GWESP decay {tau} must be positive")));
                }
            }
        }
        Ok(ErgmSpec { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Read-only adjacency access shared by the immutable graph and the MCMC
/// chain's mutable state.
pub(crate) trait AdjacencyView {
    fn node_count(&self) -> usize;
    fn neighbors_of(&self, v: usize) -> &[usize];
    fn edge_present(&self, u: usize, v: usize) -> bool;
}

impl AdjacencyView for AttributedGraph {
    fn node_count(&self) -> usize {
        self.n()
    }
    fn neighbors_of(&self, v: usize) -> &[usize] {
        self.neighbors(v)
    }
    fn edge_present(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
}

impl AdjacencyView for DynGraph {
    fn node_count(&self) -> usize {
        self.n()
    }
    fn neighbors_of(&self, v: usize) -> &[usize] {
        self.neighbors(v)
    }
    fn edge_present(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
}

/// Terms with attribute references resolved to value vectors.
#[derive(Debug, Clone)]
pub(crate) enum ResolvedTerm {
    Edges,
    Cov(Vec<f64>),
    Match(Vec<u32>),
    Esp(usize),
    Gwesp(f64),
}

/// Resolve attribute names against a node table. NodeCov takes continuous
/// values directly and encodes two-level categoricals as 0/1; NodeMatch
/// requires a categorical attribute.
pub(crate) fn resolve_terms(table: &NodeTable, spec: &ErgmSpec) -> Result<Vec<ResolvedTerm>> {
    spec.terms
        .iter()
        .map(|term| match term {
            TermKind::Edges => Ok(ResolvedTerm::Edges),
            TermKind::NodeCov(name) => {
                let (_, cspec) = table
                    .schema()
                    .column(name)
                    .ok_or_else(|| Error::SchemaError(format!("no column `{name}`")))?;
                match &cspec.kind {
                    ColumnKind::Continuous { .. } => {
                        Ok(ResolvedTerm::Cov(table.continuous(name)?.to_vec()))
                    }
                    ColumnKind::Categorical { levels } if levels.len() == 2 => {
                        let values =
                            table.categorical(name)?.iter().map(|&v| v as f64).collect();
                        Ok(ResolvedTerm::Cov(values))
                    }
                    ColumnKind::Categorical { levels } => Err(Error::TypeError(format!(
                        "NodeCov needs numeric or binary data; `{name}` has {} levels",
                        levels.len()
                    ))),
                }
            }
            TermKind::NodeMatch(name) => {
                let (_, cspec) = table
                    .schema()
                    .column(name)
                    .ok_or_else(|| Error::SchemaError(format!("no column `{name}`")))?;
                match &cspec.kind {
                    ColumnKind::Categorical { .. } => {
                        Ok(ResolvedTerm::Match(table.categorical(name)?.to_vec()))
                    }
                    ColumnKind::Continuous { .. } => Err(Error::TypeError(format!(
                        "NodeMatch needs a categorical attribute, `{name}` is continuous"
                    ))),
                }
            }
            TermKind::Esp(k) => Ok(ResolvedTerm::Esp(*k)),
            TermKind::Gwesp(tau) => Ok(ResolvedTerm::Gwesp(*tau)),
        })
        .collect()
}

/// Per-edge weight of the GWESP statistic for an edge with `k` shared
/// partners.
#[inline]
pub(crate) fn gwesp_weight(tau: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    math::exp(tau) * (1.0 - math::powf(1.0 - math::exp(-tau), k as f64))
}

/// Sorted-list intersection size.
fn common_neighbor_count(a: &[usize], b: &[usize]) -> usize {
    let mut i = 0;
    let mut j = 0;
    let mut count = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn common_neighbors(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Does any term need shared-partner counts?
fn needs_shared_partners(terms: &[ResolvedTerm]) -> bool {
    terms.iter().any(|t| matches!(t, ResolvedTerm::Esp(_) | ResolvedTerm::Gwesp(_)))
}

/// Sufficient statistics `f(G)` for a spec over a graph.
pub fn sufficient_statistics(graph: &AttributedGraph, spec: &ErgmSpec) -> Result<Vec<f64>> {
    let terms = resolve_terms(graph.nodes(), spec)?;
    Ok(sufficient_statistics_resolved(graph, &terms))
}

pub(crate) fn sufficient_statistics_resolved<G: AdjacencyView>(
    graph: &G,
    terms: &[ResolvedTerm],
) -> Vec<f64> {
    // Enumerate canonical edges from the adjacency view
    let n = graph.node_count();
    let mut stats = alloc::vec![0.0f64; terms.len()];
    let want_sp = needs_shared_partners(terms);
    for u in 0..n {
        for &v in graph.neighbors_of(u) {
            if v <= u {
                continue;
            }
            let sp = if want_sp {
                common_neighbor_count(graph.neighbors_of(u), graph.neighbors_of(v))
            } else {
                0
            };
            for (slot, term) in terms.iter().enumerate() {
                match term {
                    ResolvedTerm::Edges => stats[slot] += 1.0,
                    ResolvedTerm::Cov(x) => stats[slot] += x[u] + x[v],
                    ResolvedTerm::Match(x) => {
                        if x[u] == x[v] {
                            stats[slot] += 1.0;
                        }
                    }
                    ResolvedTerm::Esp(k) => {
                        if sp == *k {
                            stats[slot] += 1.0;
                        }
                    }
                    ResolvedTerm::Gwesp(tau) => stats[slot] += gwesp_weight(*tau, sp),
                }
            }
        }
    }
    stats
}

/// Change statistics `delta f = f(G + ij) - f(G - ij)` for one dyad,
/// computed locally (the rest of the graph stays as-is; the dyad's own
/// current state does not affect the result).
pub fn change_statistic(
    graph: &AttributedGraph,
    pair: (usize, usize),
    spec: &ErgmSpec,
) -> Result<Vec<f64>> {
    let (i, j) = pair;
    if i == j {
        return Err(Error::SelfLoop(i));
    }
    if i >= graph.n() {
        return Err(Error::IndexError { index: i, len: graph.n() });
    }
    if j >= graph.n() {
        return Err(Error::IndexError { index: j, len: graph.n() });
    }
    let terms = resolve_terms(graph.nodes(), spec)?;
    Ok(change_statistic_resolved(graph, pair, &terms))
}

pub(crate) fn change_statistic_resolved<G: AdjacencyView>(
    graph: &G,
    (i, j): (usize, usize),
    terms: &[ResolvedTerm],
) -> Vec<f64> {
    let mut delta = alloc::vec![0.0f64; terms.len()];
    let want_sp = needs_shared_partners(terms);
    // shared-partner bookkeeping, masking the (i, j) edge itself
    let (cn, ij_present) = if want_sp {
        (
            common_neighbors(graph.neighbors_of(i), graph.neighbors_of(j)),
            graph.edge_present(i, j),
        )
    } else {
        (Vec::new(), false)
    };
    let mask = usize::from(ij_present);
    for (slot, term) in terms.iter().enumerate() {
        match term {
            ResolvedTerm::Edges => delta[slot] = 1.0,
            ResolvedTerm::Cov(x) => delta[slot] = x[i] + x[j],
            ResolvedTerm::Match(x) => delta[slot] = f64::from(x[i] == x[j]),
            ResolvedTerm::Esp(k) => {
                let k = *k;
                let mut d = 0.0;
                // the (i, j) edge itself lands in bucket |CN|
                if cn.len() == k {
                    d += 1.0;
                }
                // each common neighbor's edges to i and j shift up a bucket
                for &w in &cn {
                    let sp_iw = common_neighbor_count(graph.neighbors_of(i), graph.neighbors_of(w))
                        - mask;
                    let sp_jw = common_neighbor_count(graph.neighbors_of(j), graph.neighbors_of(w))
                        - mask;
                    d += f64::from(sp_iw + 1 == k) - f64::from(sp_iw == k);
                    d += f64::from(sp_jw + 1 == k) - f64::from(sp_jw == k);
                }
                delta[slot] = d;
            }
            ResolvedTerm::Gwesp(tau) => {
                let tau = *tau;
                let mut d = gwesp_weight(tau, cn.len());
                for &w in &cn {
                    let sp_iw = common_neighbor_count(graph.neighbors_of(i), graph.neighbors_of(w))
                        - mask;
                    let sp_jw = common_neighbor_count(graph.neighbors_of(j), graph.neighbors_of(w))
                        - mask;
                    d += gwesp_weight(tau, sp_iw + 1) - gwesp_weight(tau, sp_iw);
                    d += gwesp_weight(tau, sp_jw + 1) - gwesp_weight(tau, sp_jw);
                }
                delta[slot] = d;
            }
        }
    }
    delta
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, erdos_renyi_gnm, Column, ColumnSpec, EdgeList, FeatureSchema};
    use alloc::vec;

    fn labeled_table(labels: &[u32]) -> NodeTable {
        let schema = FeatureSchema::new(vec![
            ColumnSpec {
                name: "grp".into(),
                kind: ColumnKind::Categorical { levels: vec!["a".into(), "b".into()] },
            },
            ColumnSpec { name: "w".into(), kind: ColumnKind::Continuous { min: 0.0, max: 10.0 } },
        ])
        .unwrap();
        let ws: Vec<f64> = (0..labels.len()).map(|i| i as f64).collect();
        NodeTable::new(
            labels.len(),
            schema,
            vec![Column::Categorical(labels.to_vec()), Column::Continuous(ws)],
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ErgmSpec::new(vec![]).is_err());
        assert!(ErgmSpec::new(vec![TermKind::Edges, TermKind::Edges]).is_err());
        assert!(ErgmSpec::new(vec![TermKind::Gwesp(0.0)]).is_err());
        assert!(ErgmSpec::new(vec![TermKind::Edges, TermKind::Gwesp(0.5)]).is_ok());
    }

    #[test]
    fn empty_graph_has_zero_statistics() {
        let table = labeled_table(&[0, 1, 0]);
        let g = build_graph(table, EdgeList::from_pairs(vec![])).unwrap();
        let spec = ErgmSpec::new(vec![
            TermKind::Edges,
            TermKind::NodeMatch("grp".into()),
            TermKind::NodeCov("w".into()),
            TermKind::Esp(1),
            TermKind::Gwesp(0.5),
        ])
        .unwrap();
        assert_eq!(sufficient_statistics(&g, &spec).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn triangle_statistics() {
        // triangle: every edge has exactly one shared partner
        let table = labeled_table(&[0, 0, 1]);
        let g =
            build_graph(table, EdgeList::from_pairs(vec![(0, 1), (0, 2), (1, 2)])).unwrap();
        let spec = ErgmSpec::new(vec![TermKind::Edges, TermKind::Esp(1)]).unwrap();
        assert_eq!(sufficient_statistics(&g, &spec).unwrap(), vec![3.0, 3.0]);

        // nodecov: sum over edges of w_i + w_j with w = (0, 1, 2)
        let cov = ErgmSpec::new(vec![TermKind::NodeCov("w".into())]).unwrap();
        assert_eq!(sufficient_statistics(&g, &cov).unwrap(), vec![(0.0 + 1.0) + (0.0 + 2.0) + (1.0 + 2.0)]);

        // nodematch on labels (a, a, b): only edge (0, 1) matches
        let m = ErgmSpec::new(vec![TermKind::NodeMatch("grp".into())]).unwrap();
        assert_eq!(sufficient_statistics(&g, &m).unwrap(), vec![1.0]);
    }

    #[test]
    fn gwesp_matches_shared_partner_tally_oracle() {
        let tau = 0.5;
        for seed in 0..6u64 {
            let base = erdos_renyi_gnm(7, 12, seed).unwrap();
            let table = labeled_table(&[0, 1, 0, 1, 0, 1, 0]);
            let g = build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap();
            let spec = ErgmSpec::new(vec![TermKind::Gwesp(tau)]).unwrap();
            let got = sufficient_statistics(&g, &spec).unwrap()[0];
            // brute-force shared-partner tally over all edges
            let mut expect = 0.0;
            for &(u, v) in g.edges() {
                let mut sp = 0usize;
                for w in 0..7 {
                    if w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w) {
                        sp += 1;
                    }
                }
                expect += gwesp_weight(tau, sp);
            }
            assert!((got - expect).abs() < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn change_statistic_simple_terms() {
        let table = labeled_table(&[0, 0, 1, 1]);
        let g = build_graph(table, EdgeList::from_pairs(vec![(0, 1), (2, 3)])).unwrap();
        let spec = ErgmSpec::new(vec![
            TermKind::Edges,
            TermKind::NodeMatch("grp".into()),
            TermKind::NodeCov("w".into()),
        ])
        .unwrap();
        // matched pair
        let d = change_statistic(&g, (0, 1), &spec).unwrap();
        assert_eq!(d, vec![1.0, 1.0, 1.0]);
        // unmatched pair
        let d = change_statistic(&g, (1, 2), &spec).unwrap();
        assert_eq!(d, vec![1.0, 0.0, 3.0]);
        assert!(change_statistic(&g, (1, 1), &spec).is_err());
        assert!(change_statistic(&g, (0, 9), &spec).is_err());
    }

    #[test]
    fn change_statistics_match_full_recompute_exhaustively() {
        // every dyad of random graphs, against f(G+ij) - f(G-ij) by
        // rebuild-and-recompute
        let spec = ErgmSpec::new(vec![
            TermKind::Edges,
            TermKind::NodeMatch("grp".into()),
            TermKind::NodeCov("w".into()),
            TermKind::Esp(0),
            TermKind::Esp(1),
            TermKind::Esp(2),
            TermKind::Gwesp(0.7),
        ])
        .unwrap();
        for seed in 0..8u64 {
            let base = erdos_renyi_gnm(6, 3 + (seed % 7) as usize, seed).unwrap();
            let table = labeled_table(&[0, 1, 0, 1, 1, 0]);
            let g = build_graph(table.clone(), EdgeList::from_pairs(base.edges().to_vec()))
                .unwrap();
            for i in 0..6 {
                for j in (i + 1)..6 {
                    let local = change_statistic(&g, (i, j), &spec).unwrap();
                    // oracle: rebuild with and without the dyad
                    let mut with_edges: Vec<(usize, usize)> = g.edges().to_vec();
                    let mut without_edges = with_edges.clone();
                    if g.has_edge(i, j) {
                        without_edges.retain(|&e| e != (i, j));
                    } else {
                        with_edges.push((i, j));
                    }
                    let g_with =
                        build_graph(table.clone(), EdgeList::from_pairs(with_edges)).unwrap();
                    let g_without =
                        build_graph(table.clone(), EdgeList::from_pairs(without_edges)).unwrap();
                    let f_with = sufficient_statistics(&g_with, &spec).unwrap();
                    let f_without = sufficient_statistics(&g_without, &spec).unwrap();
                    for slot in 0..spec.len() {
                        let expect = f_with[slot] - f_without[slot];
                        assert!(
                            (local[slot] - expect).abs() < 1e-10,
                            "seed {seed} dyad ({i},{j}) term {slot}: {} vs {expect}",
                            local[slot]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn statistics_invariant_under_consistent_permutation() {
        use crate::graph::{apply_permutation, Permutation};
        let base = erdos_renyi_gnm(7, 11, 3).unwrap();
        let table = labeled_table(&[0, 1, 1, 0, 1, 0, 0]);
        let g = build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap();
        let spec = ErgmSpec::new(vec![
            TermKind::Edges,
            TermKind::NodeMatch("grp".into()),
            TermKind::NodeCov("w".into()),
            TermKind::Gwesp(0.5),
        ])
        .unwrap();
        let f = sufficient_statistics(&g, &spec).unwrap();
        for seed in 0..5 {
            let p = Permutation::random(7, seed);
            let h = apply_permutation(&g, &p).unwrap();
            let fh = sufficient_statistics(&h, &spec).unwrap();
            for (a, b) in f.iter().zip(&fh) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn missing_attribute_is_schema_error() {
        let g = erdos_renyi_gnm(4, 3, 0).unwrap();
        let spec = ErgmSpec::new(vec![TermKind::NodeMatch("nope".into())]).unwrap();
        assert!(matches!(sufficient_statistics(&g, &spec), Err(Error::SchemaError(_))));
    }
}
