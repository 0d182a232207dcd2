//! Workspace configuration (one JSON file drives every command) and the
//! seed-derivation rule.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use synthnet_core::ergm::{Proposal, TermKind};
use synthnet_core::gnn::Arch;

use crate::error::{CliError, CliResult};

/// Paths of one on-disk graph bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundlePaths {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub schema: PathBuf,
}

/// Paths of a node table without edges (a population).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TablePaths {
    pub nodes: PathBuf,
    pub schema: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_attributes() -> Vec<String> {
    Vec::new()
}

/// `stats` / `compare` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsBlock {
    /// Categorical attributes whose joint mixing matrices go into the
    /// report.
    pub attributes: Vec<String>,
}

impl Default for StatsBlock {
    fn default() -> Self {
        StatsBlock { attributes: default_attributes() }
    }
}

/// `sample` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleBlock {
    /// star | neighborhood | snowball | random-walk
    pub kind: String,
    pub seeds: Vec<usize>,
    pub waves: usize,
    pub roots: usize,
    pub walk_length: usize,
}

impl Default for SampleBlock {
    fn default() -> Self {
        SampleBlock {
            kind: "random-walk".into(),
            seeds: vec![0],
            waves: 2,
            roots: 512,
            walk_length: 3,
        }
    }
}

/// `train-nodeclass` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodeclassBlock {
    pub target: String,
    pub arch: Arch,
    pub hidden_dims: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub train_frac: f64,
    pub walk_roots: usize,
    pub walk_length: usize,
    pub batch_size: usize,
}

impl Default for NodeclassBlock {
    fn default() -> Self {
        NodeclassBlock {
            target: String::new(),
            arch: Arch::Sage,
            hidden_dims: vec![32, 32],
            epochs: 100,
            learning_rate: 1e-2,
            train_frac: 0.8,
            walk_roots: 512,
            walk_length: 3,
            batch_size: 256,
        }
    }
}

/// Where the fusion target mixing matrix comes from.
#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum MixingTarget {
    /// The input graph's own joint mixing matrix.
    #[default]
    Observed,
    /// Uniform over the upper-triangular cells.
    Uniform,
    /// A JSON file holding the matrix (array of arrays).
    File(PathBuf),
}

/// `train-linkpred` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkpredBlock {
    pub arch: Arch,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub edge_split_frac: f64,
    pub negatives_per_positive: usize,
    pub walk_roots: usize,
    pub walk_length: usize,
    pub lambda: f64,
    pub mixing_attribute: Option<String>,
    pub mixing_target: MixingTarget,
    pub mixing_pairs_per_batch: usize,
}

impl Default for LinkpredBlock {
    fn default() -> Self {
        LinkpredBlock {
            arch: Arch::Sage,
            hidden_dims: vec![64],
            output_dim: 16,
            epochs: 200,
            learning_rate: 1e-2,
            edge_split_frac: 0.5,
            negatives_per_positive: 1,
            walk_roots: 512,
            walk_length: 3,
            lambda: 0.0,
            mixing_attribute: None,
            mixing_target: MixingTarget::Observed,
            mixing_pairs_per_batch: 10_000,
        }
    }
}

/// `gen-attrs` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenAttrsBlock {
    /// marginal | empirical | adversarial
    pub mode: String,
    /// Population rows to sample.
    pub n: usize,
    pub latent_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for GenAttrsBlock {
    fn default() -> Self {
        GenAttrsBlock {
            mode: "marginal".into(),
            n: 1000,
            latent_dim: 4,
            hidden_dims: vec![32],
            steps: 3000,
            batch_size: 128,
            learning_rate: 1e-3,
        }
    }
}

/// Reference graph size for the edge/node-ratio target.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReferenceCounts {
    pub nodes: usize,
    pub edges: usize,
}

/// `generate` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateBlock {
    pub iterations: usize,
    pub batch_size: usize,
    /// Explicit target edge count; wins over `reference`.
    pub target_edges: Option<usize>,
    /// Reference (N, M) for `round(n_gen * M / N)`.
    pub reference: Option<ReferenceCounts>,
    pub refresh_every: usize,
}

impl Default for GenerateBlock {
    fn default() -> Self {
        GenerateBlock {
            iterations: 200,
            batch_size: 256,
            target_edges: None,
            reference: None,
            refresh_every: 1,
        }
    }
}

/// MPLE sub-block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MpleBlock {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub dyad_node_cap: usize,
    pub dyad_sample: usize,
    pub edge_balanced: bool,
}

impl Default for MpleBlock {
    fn default() -> Self {
        let d = synthnet_core::ergm::MpleConfig::default();
        MpleBlock {
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            dyad_node_cap: d.dyad_node_cap,
            dyad_sample: d.dyad_sample,
            edge_balanced: d.edge_balanced,
        }
    }
}

/// MCMC sub-block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McmcBlock {
    pub proposal: Proposal,
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for McmcBlock {
    fn default() -> Self {
        McmcBlock { proposal: Proposal::Toggle, steps: 20_000, burn_in: 2_000, thin: 20 }
    }
}

/// `ergm-*` parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErgmBlock {
    pub terms: Vec<TermKind>,
    pub mple: MpleBlock,
    pub mcmc: McmcBlock,
    /// Coefficients for `ergm-sim` / `ergm-gof`; falls back to `fit_file`.
    pub theta: Option<Vec<f64>>,
    /// A fit.json written by `ergm-fit`.
    pub fit_file: Option<PathBuf>,
}

impl Default for ErgmBlock {
    fn default() -> Self {
        ErgmBlock {
            terms: vec![TermKind::Edges],
            mple: MpleBlock::default(),
            mcmc: McmcBlock::default(),
            theta: None,
            fit_file: None,
        }
    }
}

/// The whole configuration file. Every command reads the same structure
/// and uses the blocks it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkspaceConfig {
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Primary input bundle.
    pub graph: Option<BundlePaths>,
    /// Second bundle (`compare`).
    pub graph_b: Option<BundlePaths>,
    /// Input model file (`impute`, `generate`).
    pub model: Option<PathBuf>,
    /// Input population table (`generate`): a nodes.csv + schema.json pair.
    pub population: Option<TablePaths>,
    pub stats: StatsBlock,
    pub sample: SampleBlock,
    pub train_nodeclass: NodeclassBlock,
    pub train_linkpred: LinkpredBlock,
    pub gen_attrs: GenAttrsBlock,
    pub generate: GenerateBlock,
    pub ergm: ErgmBlock,
}

impl Default for WorkspaceConfig {
    fn default() -> Self {
        WorkspaceConfig {
            seed: 0,
            out_dir: default_out_dir(),
            graph: None,
            graph_b: None,
            model: None,
            population: None,
            stats: StatsBlock::default(),
            sample: SampleBlock::default(),
            train_nodeclass: NodeclassBlock::default(),
            train_linkpred: LinkpredBlock::default(),
            gen_attrs: GenAttrsBlock::default(),
            generate: GenerateBlock::default(),
            ergm: ErgmBlock::default(),
        }
    }
}

impl WorkspaceConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: WorkspaceConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(config)
    }

    pub fn require_graph(&self) -> CliResult<&BundlePaths> {
        self.graph.as_ref().ok_or_else(|| CliError::Config("`graph` paths missing".into()))
    }

    pub fn require_graph_b(&self) -> CliResult<&BundlePaths> {
        self.graph_b.as_ref().ok_or_else(|| CliError::Config("`graph_b` paths missing".into()))
    }

    pub fn require_model(&self) -> CliResult<&Path> {
        self.model.as_deref().ok_or_else(|| CliError::Config("`model` path missing".into()))
    }
}

/// Deterministic sub-seed: the first eight little-endian bytes of
/// `SHA-256(global_seed_le || label)`. Every command seeds its module
/// calls through this, so multi-command pipelines are reproducible
/// end-to-end.
pub fn derive_seed(global: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}
