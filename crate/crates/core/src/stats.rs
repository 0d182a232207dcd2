//! Network statistics used to characterize and compare graphs: degree
//! distributions, triangle counts, connected components, degree
//! assortativity, attribute mixing matrices, Laplacian spectra, and
//! power-law tail fits.
//!
//! Every statistic here is a pure function of the graph and is invariant
//! under node relabeling.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, ColumnKind};
use crate::math;

/// Node count above which the dense Laplacian eigensolver refuses to run.
pub const DENSE_EIGEN_CAP: usize = 2000;

/// Exact degree histogram with derived pmf, ccdf, mean, and median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    /// degree -> node count
    pub counts: BTreeMap<usize, usize>,
    pub n: usize,
    pub mean: f64,
    /// Lower median of the degree multiset.
    pub median: usize,
}

impl DegreeDistribution {
    /// Fraction of nodes with degree exactly `k`.
    pub fn pmf(&self, k: usize) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        *self.counts.get(&k).unwrap_or(&0) as f64 / self.n as f64
    }

    /// Fraction of nodes with degree `>= k` (so `ccdf(0) == 1`).
    pub fn ccdf(&self, k: usize) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let tail: usize = self.counts.range(k..).map(|(_, c)| c).sum();
        tail as f64 / self.n as f64
    }

    pub fn max_degree(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

/// Degree histogram of a graph. Mean is `2M/N`.
pub fn degree_distribution(graph: &AttributedGraph) -> DegreeDistribution {
    let n = graph.n();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut degrees: Vec<usize> = Vec::with_capacity(n);
    for v in 0..n {
        let d = graph.neighbors(v).len();
        degrees.push(d);
        *counts.entry(d).or_default() += 1;
    }
    degrees.sort_unstable();
    let mean = if n == 0 { 0.0 } else { 2.0 * graph.m() as f64 / n as f64 };
    let median = if n == 0 { 0 } else { degrees[(n - 1) / 2] };
    DegreeDistribution { counts, n, mean, median }
}

fn triangles_through_edge(graph: &AttributedGraph, u: usize, v: usize) -> u64 {
    // common neighbors w > v, so each triangle u < v < w is counted exactly
    // once, at the edge of its two smallest vertices
    let nu = graph.neighbors(u);
    let nv = graph.neighbors(v);
    let mut i = nu.partition_point(|&x| x <= v);
    let mut j = nv.partition_point(|&x| x <= v);
    let mut count = 0u64;
    while i < nu.len() && j < nv.len() {
        match nu[i].cmp(&nv[j]) {
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

/// Number of unordered node triples with all three edges present, counted by
/// sorted neighbor-list intersection (no dense matrices), so graphs with
/// millions of edges are fine.
pub fn count_triangles(graph: &AttributedGraph) -> u64 {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        graph.edges().par_iter().map(|&(u, v)| triangles_through_edge(graph, u, v)).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        graph.edges().iter().map(|&(u, v)| triangles_through_edge(graph, u, v)).sum()
    }
}

/// Connected-component labeling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentInfo {
    /// Component id per node; ids are assigned in order of each component's
    /// smallest node.
    pub assignment: Vec<usize>,
    /// Node count per component id.
    pub sizes: Vec<usize>,
    /// Largest component size (0 for the empty graph).
    pub giant: usize,
    /// Number of degree-0 nodes.
    pub isolates: usize,
}

impl ComponentInfo {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// BFS component labeling with giant-component size and isolate count.
pub fn connected_components(graph: &AttributedGraph) -> ComponentInfo {
    let n = graph.n();
    let mut assignment = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut isolates = 0usize;
    let mut queue = alloc::collections::VecDeque::new();
    for start in 0..n {
        if graph.neighbors(start).is_empty() {
            isolates += 1;
        }
        if assignment[start] != usize::MAX {
            continue;
        }
        let comp = sizes.len();
        let mut size = 0usize;
        assignment[start] = comp;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in graph.neighbors(u) {
                if assignment[v] == usize::MAX {
                    assignment[v] = comp;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    let giant = sizes.iter().copied().max().unwrap_or(0);
    ComponentInfo { assignment, sizes, giant, isolates }
}

/// Average degree of the neighbors of degree-k nodes, for every observed
/// degree `k >= 1`. Isolates are excluded (their neighbor average is
/// undefined).
pub fn avg_nearest_neighbor_degree(graph: &AttributedGraph) -> BTreeMap<usize, f64> {
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for v in 0..graph.n() {
        let neighbors = graph.neighbors(v);
        let k = neighbors.len();
        if k == 0 {
            continue;
        }
        let total: usize = neighbors.iter().map(|&u| graph.neighbors(u).len()).sum();
        let knn_i = total as f64 / k as f64;
        let entry = sums.entry(k).or_insert((0.0, 0));
        entry.0 += knn_i;
        entry.1 += 1;
    }
    sums.into_iter().map(|(k, (sum, count))| (k, sum / count as f64)).collect()
}

/// Joint or conditional edge-endpoint tabulation for a categorical
/// attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingMode {
    Joint,
    Conditional,
}

/// Edge mixing matrix for one categorical attribute.
///
/// Joint mode stores the upper-triangular form: entry `(a, b)` with `a <= b`
/// is the fraction of edges whose endpoint labels are `{a, b}` (each
/// unordered edge contributes half to each of the two orderings, which fold
/// into the single upper entry); entries below the diagonal are zero, and
/// the total over `a <= b` is 1. Conditional mode stores the full square
/// row-normalized endpoint distribution; rows of labels with no incident
/// edges are all-zero and listed in `empty_rows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingMatrix {
    pub attribute: String,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
    pub mode: MixingMode,
    pub empty_rows: Vec<usize>,
}

/// Mixing matrix of `graph` over a categorical attribute.
pub fn mixing_matrix(
    graph: &AttributedGraph,
    attribute: &str,
    mode: MixingMode,
) -> Result<MixingMatrix> {
    let (_, spec) = graph
        .nodes()
        .schema()
        .column(attribute)
        .ok_or_else(|| Error::SchemaError(format!("no column `{attribute}`")))?;
    let ColumnKind::Categorical { levels } = &spec.kind else {
        return Err(Error::TypeError(format!("column `{attribute}` is not categorical")));
    };
    if graph.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    let values = graph.nodes().categorical(attribute)?;
    let l = levels.len();
    let mut counts = vec![vec![0u64; l]; l];
    for &(u, v) in graph.edges() {
        let (a, b) = (values[u] as usize, values[v] as usize);
        counts[a][b] += 1;
        if a != b {
            counts[b][a] += 1;
        }
    }
    let m = graph.m() as f64;
    let (entries, empty_rows) = match mode {
        MixingMode::Joint => {
            let mut entries = vec![vec![0.0; l]; l];
            for a in 0..l {
                entries[a][a] = counts[a][a] as f64 / m;
                for b in (a + 1)..l {
                    entries[a][b] = counts[a][b] as f64 / m;
                }
            }
            (entries, Vec::new())
        }
        MixingMode::Conditional => {
            let mut entries = vec![vec![0.0; l]; l];
            let mut empty = Vec::new();
            for a in 0..l {
                // ordered endpoint counts: a-a edges count twice
                let mut row: Vec<f64> = (0..l)
                    .map(|b| if a == b { 2.0 * counts[a][a] as f64 } else { counts[a][b] as f64 })
                    .collect();
                let total: f64 = row.iter().sum();
                if total == 0.0 {
                    empty.push(a);
                } else {
                    for x in &mut row {
                        *x /= total;
                    }
                    entries[a] = row;
                }
            }
            (entries, empty)
        }
    };
    Ok(MixingMatrix {
        attribute: String::from(attribute),
        labels: levels.clone(),
        entries,
        mode,
        empty_rows,
    })
}

/// Eigenvalues of the combinatorial Laplacian `L = D - A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianSpectrum {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues below the tolerance; equals the number of connected
    /// components.
    pub zero_count: usize,
    /// Smallest eigenvalue above the tolerance (0 when none exists).
    pub spectral_gap: f64,
    /// Tolerance actually used.
    pub tolerance: f64,
}

/// Dense symmetric eigendecomposition of `L = D - A`. Pass `tolerance <= 0`
/// to use the scale-aware default `1e-8 * lambda_max`. Graphs above
/// [`DENSE_EIGEN_CAP`] nodes are refused.
pub fn laplacian_spectrum(graph: &AttributedGraph, tolerance: f64) -> Result<LaplacianSpectrum> {
    let n = graph.n();
    if n > DENSE_EIGEN_CAP {
        return Err(Error::CapacityError(format!(
            "{n} nodes exceeds the dense eigensolver cap {DENSE_EIGEN_CAP}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        l[(v, v)] = graph.neighbors(v).len() as f64;
    }
    for &(u, v) in graph.edges() {
        l[(u, v)] = -1.0;
        l[(v, u)] = -1.0;
    }
    let mut eigenvalues: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let max_ev = *eigenvalues.last().expect("nonempty");
    let tol = if tolerance > 0.0 {
        tolerance
    } else if max_ev > 0.0 {
        1e-8 * max_ev
    } else {
        1e-12
    };
    let zero_count = eigenvalues.iter().take_while(|&&ev| ev < tol).count();
    let spectral_gap = eigenvalues.iter().copied().find(|&ev| ev >= tol).unwrap_or(0.0);
    Ok(LaplacianSpectrum { eigenvalues, zero_count, spectral_gap, tolerance: tol })
}

/// Continuous-approximation maximum-likelihood fit of a power-law tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub k_min: usize,
    pub alpha_hat: f64,
    pub n_tail: usize,
    /// Kolmogorov-Smirnov distance between the tail and the fitted law;
    /// reported for qualitative comparison only.
    pub ks_distance: f64,
    /// Set when every tail degree equals `k_min` (the log-sum sits at its
    /// lower bound and the exponent estimate is unreliable).
    pub degenerate: bool,
}

/// MLE exponent for `p_k ~ k^-alpha` over the tail `k >= k_min`, using the
/// continuous approximation with the -1/2 discreteness correction:
/// `alpha = 1 + n / sum ln(k_i / (k_min - 1/2))`.
pub fn powerlaw_tail_fit(degrees: &[usize], k_min: usize) -> Result<PowerLawFit> {
    if k_min < 1 {
        return Err(Error::ValueError("k_min must be at least 1".into()));
    }
    let mut tail: Vec<usize> = degrees.iter().copied().filter(|&k| k >= k_min).collect();
    if tail.len() < 2 {
        return Err(Error::InsufficientData);
    }
    tail.sort_unstable();
    let shift = k_min as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&k| math::ln(k as f64 / shift)).sum();
    let n_tail = tail.len();
    let alpha_hat = 1.0 + n_tail as f64 / log_sum;
    let degenerate = tail.iter().all(|&k| k == k_min);

    // KS distance against the fitted tail CCDF
    // P(K >= k) = ((k - 1/2) / (k_min - 1/2))^(1 - alpha),
    // compared at the observed degrees only (the data is discrete)
    let mut ks = 0.0f64;
    let mut below = 0usize;
    let mut idx = 0usize;
    while idx < n_tail {
        let k = tail[idx];
        let mut j = idx;
        while j < n_tail && tail[j] == k {
            j += 1;
        }
        let model = math::powf((k as f64 - 0.5) / shift, 1.0 - alpha_hat);
        let empirical = (n_tail - below) as f64 / n_tail as f64;
        ks = ks.max((model - empirical).abs());
        below = j;
        idx = j;
    }
    Ok(PowerLawFit { k_min, alpha_hat, n_tail, ks_distance: ks, degenerate })
}

/// Overview of a graph's structure; the per-attribute mixing matrices are
/// joint-mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: usize,
    pub m: usize,
    pub giant_component: usize,
    pub isolates: usize,
    pub triangles: u64,
    pub mean_degree: f64,
    pub median_degree: usize,
    pub degree_distribution: DegreeDistribution,
    pub knn: BTreeMap<usize, f64>,
    pub mixing: Vec<MixingMatrix>,
}

/// Compute a [`StatsReport`], including joint mixing matrices for the named
/// categorical attributes.
pub fn stats_report(graph: &AttributedGraph, attributes: &[&str]) -> Result<StatsReport> {
    let dd = degree_distribution(graph);
    let comps = connected_components(graph);
    let mixing = attributes
        .iter()
        .map(|a| mixing_matrix(graph, a, MixingMode::Joint))
        .collect::<Result<Vec<_>>>()?;
    Ok(StatsReport {
        n: graph.n(),
        m: graph.m(),
        giant_component: comps.giant,
        isolates: comps.isolates,
        triangles: count_triangles(graph),
        mean_degree: dd.mean,
        median_degree: dd.median,
        degree_distribution: dd,
        knn: avg_nearest_neighbor_degree(graph),
        mixing,
    })
}

/// Signed differences `right - left` for the scalar metrics of two reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDeltas {
    pub n: i64,
    pub m: i64,
    pub giant_component: i64,
    pub isolates: i64,
    pub triangles: i64,
    pub mean_degree: f64,
    pub median_degree: i64,
}

/// Side-by-side comparison of two graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsComparison {
    pub left: StatsReport,
    pub right: StatsReport,
    pub deltas: StatsDeltas,
    /// Aligned degree histogram rows `(degree, left count, right count)`.
    pub degree_histogram: Vec<(usize, usize, usize)>,
}

/// Paired stats reports with per-metric deltas and aligned degree
/// histograms. Every requested attribute must exist with an identical
/// categorical schema in both graphs.
pub fn compare_stats(
    left: &AttributedGraph,
    right: &AttributedGraph,
    attributes: &[&str],
) -> Result<StatsComparison> {
    for name in attributes {
        let ls = left
            .nodes()
            .schema()
            .column(name)
            .ok_or_else(|| Error::SchemaError(format!("left graph lacks column `{name}`")))?;
        let rs = right
            .nodes()
            .schema()
            .column(name)
            .ok_or_else(|| Error::SchemaError(format!("right graph lacks column `{name}`")))?;
        if ls.1.kind != rs.1.kind {
            return Err(Error::SchemaError(format!("column `{name}` differs between graphs")));
        }
    }
    let left_report = stats_report(left, attributes)?;
    let right_report = stats_report(right, attributes)?;
    let deltas = StatsDeltas {
        n: right_report.n as i64 - left_report.n as i64,
        m: right_report.m as i64 - left_report.m as i64,
        giant_component: right_report.giant_component as i64 - left_report.giant_component as i64,
        isolates: right_report.isolates as i64 - left_report.isolates as i64,
        triangles: right_report.triangles as i64 - left_report.triangles as i64,
        mean_degree: right_report.mean_degree - left_report.mean_degree,
        median_degree: right_report.median_degree as i64 - left_report.median_degree as i64,
    };
    let max_deg = left_report
        .degree_distribution
        .max_degree()
        .max(right_report.degree_distribution.max_degree());
    let degree_histogram = (0..=max_deg)
        .map(|k| {
            (
                k,
                left_report.degree_distribution.counts.get(&k).copied().unwrap_or(0),
                right_report.degree_distribution.counts.get(&k).copied().unwrap_or(0),
            )
        })
        .collect();
    Ok(StatsComparison { left: left_report, right: right_report, deltas, degree_histogram })
}
