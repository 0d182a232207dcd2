//! Metropolis samplers for ERGM distributions and the degree
//! goodness-of-fit report built on them.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, DynGraph};
use crate::math;
use crate::stats::degree_distribution;

use super::{
    change_statistic_resolved, resolve_terms, sufficient_statistics_resolved, ErgmSpec,
};

/// Proposal kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    /// Flip one uniformly chosen dyad.
    Toggle,
    /// Delete a uniform edge and add a uniform non-edge in one move,
    /// keeping the edge count constant.
    FixedDensity,
}

/// Sampler configuration. `steps > burn_in` and `thin >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub proposal: Proposal,
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl McmcConfig {
    fn validate(&self) -> Result<()> {
        if self.steps <= self.burn_in {
            return Err(Error::ValueError("steps must exceed burn_in".into()));
        }
        if self.thin == 0 {
            return Err(Error::ValueError("thin must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-step statistic trace, row-major over `terms` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTrace {
    pub terms: usize,
    values: Vec<f64>,
}

impl StatTrace {
    fn push(&mut self, stats: &[f64]) {
        self.values.extend_from_slice(stats);
    }

    pub fn len(&self) -> usize {
        self.values.len().checked_div(self.terms).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Statistics after step `step` (0-based).
    pub fn row(&self, step: usize) -> &[f64] {
        &self.values[step * self.terms..(step + 1) * self.terms]
    }
}

/// Sampler output: thinned post-burn-in graph samples, the per-step
/// statistic trace, and the overall acceptance rate.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcRun {
    pub samples: Vec<AttributedGraph>,
    pub trace: StatTrace,
    pub acceptance_rate: f64,
}

fn metropolis_accept(log_ratio: f64, rng: &mut ChaCha8Rng) -> bool {
    log_ratio >= 0.0 || rng.random::<f64>() < math::exp(log_ratio)
}

fn dot(theta: &[f64], delta: &[f64]) -> f64 {
    theta.iter().zip(delta).map(|(t, d)| t * d).sum()
}

fn random_dyad(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    loop {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            return if u < v { (u, v) } else { (v, u) };
        }
    }
}

fn random_non_edge(graph: &DynGraph, rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
    let n = graph.n() as u64;
    let pairs = n * n.saturating_sub(1) / 2;
    if graph.m() as u64 >= pairs {
        return None;
    }
    loop {
        let pair = random_dyad(graph.n(), rng);
        if !graph.has_edge(pair.0, pair.1) {
            return Some(pair);
        }
    }
}

/// Sample graphs from `P(G) ~ exp(theta . f(G))` starting at `init`. Node
/// attributes ride along unchanged. The trace records `f` after every
/// step; samples are taken after burn-in at the thinning stride.
pub fn mcmc_sample(
    init: &AttributedGraph,
    spec: &ErgmSpec,
    theta: &[f64],
    config: &McmcConfig,
) -> Result<McmcRun> {
    config.validate()?;
    if theta.len() != spec.len() {
        return Err(Error::DimensionError(alloc::format!(
            "{} coefficients for {} terms",
            theta.len(),
            spec.len()
        )));
    }
    let terms = resolve_terms(init.nodes(), spec)?;
    let mut graph = DynGraph::from_graph(init);
    let mut stats = sufficient_statistics_resolved(&graph, &terms);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = StatTrace { terms: spec.len(), values: Vec::with_capacity(config.steps * spec.len()) };
    let mut samples = Vec::new();
    let mut accepted = 0usize;

    for step in 0..config.steps {
        match config.proposal {
            Proposal::Toggle => {
                let pair = random_dyad(graph.n(), &mut rng);
                let delta = change_statistic_resolved(&graph, pair, &terms);
                let present = graph.has_edge(pair.0, pair.1);
                let log_ratio =
                    if present { -dot(theta, &delta) } else { dot(theta, &delta) };
                if metropolis_accept(log_ratio, &mut rng) {
                    accepted += 1;
                    if present {
                        graph.remove_edge(pair.0, pair.1);
                        for (s, d) in stats.iter_mut().zip(&delta) {
                            *s -= d;
                        }
                    } else {
                        graph.add_edge(pair.0, pair.1);
                        for (s, d) in stats.iter_mut().zip(&delta) {
                            *s += d;
                        }
                    }
                }
            }
            Proposal::FixedDensity => {
                // a paired delete + add keeping M constant; skip when no
                // move exists
                let Some(edge) = graph.random_edge(&mut rng) else {
                    trace.push(&stats);
                    continue;
                };
                let Some(non_edge) = random_non_edge(&graph, &mut rng) else {
                    trace.push(&stats);
                    continue;
                };
                let delta_remove = change_statistic_resolved(&graph, edge, &terms);
                graph.remove_edge(edge.0, edge.1);
                let delta_add = change_statistic_resolved(&graph, non_edge, &terms);
                let total: Vec<f64> =
                    delta_add.iter().zip(&delta_remove).map(|(a, r)| a - r).collect();
                if metropolis_accept(dot(theta, &total), &mut rng) {
                    accepted += 1;
                    graph.add_edge(non_edge.0, non_edge.1);
                    for (s, d) in stats.iter_mut().zip(&total) {
                        *s += d;
                    }
                } else {
                    graph.add_edge(edge.0, edge.1);
                }
            }
        }
        // resync the running statistics periodically against float drift
        if (step + 1).is_multiple_of(65_536) {
            stats = sufficient_statistics_resolved(&graph, &terms);
        }
        trace.push(&stats);
        if step >= config.burn_in && (step - config.burn_in).is_multiple_of(config.thin) {
            samples.push(graph.clone().into_graph(init.nodes().clone())?);
        }
    }

    Ok(McmcRun {
        samples,
        trace,
        acceptance_rate: accepted as f64 / config.steps as f64,
    })
}

/// Goodness-of-fit configuration: the chain to simulate plus percentile
/// band edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofConfig {
    pub mcmc: McmcConfig,
}

/// Degree-distribution envelope of simulated graphs against a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    /// Degrees `0..=max` observed in the reference or any sample.
    pub degrees: Vec<usize>,
    /// Node count per degree in the reference graph.
    pub reference_counts: Vec<usize>,
    /// 5th / 50th / 95th percentile node counts per degree across samples.
    pub p05: Vec<f64>,
    pub p50: Vec<f64>,
    pub p95: Vec<f64>,
    pub samples_used: usize,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    // nearest-rank
    let rank = math::ceil(q * sorted.len() as f64).max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Simulate from the model (starting at the reference graph) and overlay
/// the simulated degree-distribution envelope against the reference. A
/// zero-step chain reports over the initial graph alone.
pub fn gof_degree(
    reference: &AttributedGraph,
    spec: &ErgmSpec,
    theta: &[f64],
    config: &GofConfig,
) -> Result<GofReport> {
    let samples = if config.mcmc.steps == 0 {
        alloc::vec![reference.clone()]
    } else {
        mcmc_sample(reference, spec, theta, &config.mcmc)?.samples
    };
    if samples.is_empty() {
        return Err(Error::EmptyData);
    }
    let ref_dd = degree_distribution(reference);
    let sample_dds: Vec<_> = samples.iter().map(degree_distribution).collect();
    let max_degree = sample_dds
        .iter()
        .map(|dd| dd.max_degree())
        .chain(core::iter::once(ref_dd.max_degree()))
        .max()
        .unwrap_or(0);
    let degrees: Vec<usize> = (0..=max_degree).collect();
    let reference_counts: Vec<usize> =
        degrees.iter().map(|k| ref_dd.counts.get(k).copied().unwrap_or(0)).collect();
    let mut p05 = Vec::with_capacity(degrees.len());
    let mut p50 = Vec::with_capacity(degrees.len());
    let mut p95 = Vec::with_capacity(degrees.len());
    for k in &degrees {
        let mut counts: Vec<f64> = sample_dds
            .iter()
            .map(|dd| dd.counts.get(k).copied().unwrap_or(0) as f64)
            .collect();
        counts.sort_by(|a, b| a.partial_cmp(b).expect("finite counts"));
        p05.push(percentile(&counts, 0.05));
        p50.push(percentile(&counts, 0.50));
        p95.push(percentile(&counts, 0.95));
    }
    Ok(GofReport { degrees, reference_counts, p05, p50, p95, samples_used: sample_dds.len() })
}
