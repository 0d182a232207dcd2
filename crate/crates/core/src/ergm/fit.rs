//! Maximum pseudo-likelihood estimation: logistic regression of the edge
//! indicator on the change statistics over dyads, fit by Newton-Raphson.
//! Degeneracy (separation or non-convergence) is flagged on the fit, not
//! thrown.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::math;
use crate::sample::{SampleKind, SubgraphSample};

use super::{change_statistic_resolved, resolve_terms, ErgmSpec};

/// Fitted parameters with convergence and degeneracy flags. Degenerate
/// fits carry no standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgmFit {
    pub theta: Vec<f64>,
    pub converged: bool,
    pub degenerate: bool,
    pub iterations: usize,
    pub std_errors: Option<Vec<f64>>,
}

/// MPLE configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpleConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Use every dyad up to this many nodes; sample above it.
    pub dyad_node_cap: usize,
    /// Dyads sampled above the cap.
    pub dyad_sample: usize,
    /// When sampling, take all edges plus an equal number of sampled
    /// non-edges instead of uniform dyads.
    pub edge_balanced: bool,
    pub seed: u64,
}

impl Default for MpleConfig {
    fn default() -> Self {
        MpleConfig {
            max_iterations: 50,
            tolerance: 1e-10,
            dyad_node_cap: 1500,
            dyad_sample: 1_000_000,
            edge_balanced: true,
            seed: 0,
        }
    }
}

/// Coefficient magnitude beyond which a fit is treated as separated.
const SEPARATION_BOUND: f64 = 25.0;

/// Fit by maximum pseudo-likelihood over all dyads (or a sample above the
/// node cap).
pub fn mple_fit(graph: &AttributedGraph, spec: &ErgmSpec, config: &MpleConfig) -> Result<ErgmFit> {
    mple_fit_masked(graph, spec, config, None)
}

/// [`mple_fit`] with a dyad mask: masked dyads are excluded from the
/// regression (the conditioning device for snowball-sampled fits).
pub fn mple_fit_masked(
    graph: &AttributedGraph,
    spec: &ErgmSpec,
    config: &MpleConfig,
    mask: Option<&BTreeSet<(usize, usize)>>,
) -> Result<ErgmFit> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::EmptyData);
    }
    let terms = resolve_terms(graph.nodes(), spec)?;
    let masked = |u: usize, v: usize| mask.is_some_and(|m| m.contains(&(u, v)));

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    if n <= config.dyad_node_cap {
        for u in 0..n {
            for v in (u + 1)..n {
                if masked(u, v) {
                    continue;
                }
                rows.push(change_statistic_resolved(graph, (u, v), &terms));
                ys.push(f64::from(graph.has_edge(u, v)));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        if config.edge_balanced {
            for &(u, v) in graph.edges() {
                if masked(u, v) {
                    continue;
                }
                rows.push(change_statistic_resolved(graph, (u, v), &terms));
                ys.push(1.0);
            }
            let positives = ys.len();
            let mut drawn = 0usize;
            while drawn < positives {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u == v {
                    continue;
                }
                let pair = if u < v { (u, v) } else { (v, u) };
                if graph.has_edge(pair.0, pair.1) || masked(pair.0, pair.1) {
                    continue;
                }
                rows.push(change_statistic_resolved(graph, pair, &terms));
                ys.push(0.0);
                drawn += 1;
            }
        } else {
            while rows.len() < config.dyad_sample {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u == v {
                    continue;
                }
                let pair = if u < v { (u, v) } else { (v, u) };
                if masked(pair.0, pair.1) {
                    continue;
                }
                rows.push(change_statistic_resolved(graph, pair, &terms));
                ys.push(f64::from(graph.has_edge(pair.0, pair.1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    // Newton-Raphson on the logistic log-likelihood
    let k = spec.len();
    let d = rows.len();
    let x = DMatrix::from_fn(d, k, |r, c| rows[r][c]);
    let y = DVector::from_fn(d, |r, _| ys[r]);
    let mut theta = DVector::zeros(k);
    let mut converged = false;
    let mut degenerate = false;
    let mut iterations = 0usize;
    let mut information = DMatrix::zeros(k, k);
    for iter in 1..=config.max_iterations {
        iterations = iter;
        let logits = &x * &theta;
        let p = logits.map(math::sigmoid);
        let gradient = x.transpose() * (&y - &p);
        let weights = p.map(|pi| pi * (1.0 - pi));
        let mut xtw = x.transpose();
        for (col, w) in weights.iter().enumerate() {
            for r in 0..k {
                xtw[(r, col)] *= w;
            }
        }
        information = &xtw * &x;
        let Some(step) = information.clone().lu().solve(&gradient) else {
            degenerate = true;
            break;
        };
        theta += &step;
        if !theta.iter().all(|t| t.is_finite()) {
            degenerate = true;
            break;
        }
        if step.amax() < config.tolerance {
            converged = true;
            break;
        }
    }
    if theta.amax() > SEPARATION_BOUND {
        degenerate = true;
    }
    if !converged {
        degenerate = true;
    }

    let std_errors = if degenerate {
        None
    } else {
        information
            .clone()
            .try_inverse()
            .map(|inv| (0..k).map(|i| math::sqrt(inv[(i, i)].max(0.0))).collect())
    };
    Ok(ErgmFit {
        theta: theta.iter().copied().collect(),
        converged,
        degenerate,
        iterations,
        std_errors,
    })
}

/// Dyad mask for fitting to a snowball sample, following the
/// wave-conditioning scheme:
///
/// 1. every dyad inside the outermost wave is fixed;
/// 2. each node of wave `w >= 1` has one present edge to the previous wave
///    held fixed (it is why the node entered the sample);
/// 3. every dyad between the outermost wave and the wave before it is
///    fixed.
///
/// Dyads are in the sample's local id space.
pub fn snowball_dyad_mask(sample: &SubgraphSample) -> Result<BTreeSet<(usize, usize)>> {
    if sample.kind != SampleKind::Snowball || sample.wave_index.len() != sample.node_ids.len() {
        return Err(Error::ValueError("dyad mask needs a snowball sample with waves".into()));
    }
    let waves = &sample.wave_index;
    let last = *waves.iter().max().unwrap_or(&0);
    let n = waves.len();
    let mut mask = BTreeSet::new();
    // rules 1 and 3
    for u in 0..n {
        for v in (u + 1)..n {
            let (wu, wv) = (waves[u], waves[v]);
            let outermost_pair = wu == last && wv == last;
            let boundary_pair = last >= 1
                && ((wu == last && wv == last - 1) || (wv == last && wu == last - 1));
            if outermost_pair || boundary_pair {
                mask.insert((u, v));
            }
        }
    }
    // rule 2: the lowest-id previous-wave neighbor of each non-seed node
    for v in 0..n {
        let w = waves[v];
        if w == 0 {
            continue;
        }
        if let Some(&u) = sample
            .graph
            .neighbors(v)
            .iter()
            .find(|&&u| waves[u] == w - 1)
        {
            mask.insert(if u < v { (u, v) } else { (v, u) });
        }
    }
    Ok(mask)
}
