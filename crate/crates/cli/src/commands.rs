//! One function per subcommand. Each reads the workspace config, derives
//! its seeds, runs the core operations, writes its artifacts under
//! `out_dir/<command>/`, validates them, and returns the one-line JSON
//! summary.

use std::path::PathBuf;

use serde_json::json;
use synthnet_core::ergm::{
    gof_degree, mcmc_sample, mple_fit, sufficient_statistics, ErgmFit, ErgmSpec, GofConfig,
    McmcConfig, MpleConfig,
};
use synthnet_core::generate::{chain_diagnostics, generate_graph, target_edge_count, ChainConfig};
use synthnet_core::graph::AttributedGraph;
use synthnet_core::sample::{
    neighborhood_sample, random_walk_batch, snowball_sample, split_edges, split_nodes,
    star_sample, SubgraphSample,
};
use synthnet_core::stats::{compare_stats, mixing_matrix, stats_report, MixingMode};
use synthnet_core::tabgen::{
    compare_marginals, fit_adversarial, fit_empirical, fit_marginal, sample_population,
    AdversarialConfig,
};
use synthnet_core::tasks::{
    evaluate_classifier, evaluate_link_predictor, impute_node_attribute, train_classifier,
    train_gae, TrainClassifierConfig, TrainGaeConfig,
};

use crate::config::{derive_seed, MixingTarget, WorkspaceConfig};
use crate::error::{CliError, CliResult};
use crate::formats::{
    fmt_f64, read_bundle, read_model, read_population, validate_artifacts, write_bundle,
    write_csv, write_json, write_model, write_nodes_csv, LoadedBundle, ModelFile, SchemaFile,
};

fn command_dir(config: &WorkspaceConfig, command: &str) -> CliResult<PathBuf> {
    let dir = config.out_dir.join(command);
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Missing cells are only legal in the column `allow` (if any).
fn reject_missing(bundle: &LoadedBundle, allow: Option<&str>) -> CliResult<()> {
    for (column, rows) in &bundle.missing {
        if Some(column.as_str()) != allow {
            return Err(CliError::Schema(format!(
                "column `{column}` has {} missing value(s); this command requires complete data",
                rows.len()
            )));
        }
    }
    Ok(())
}

fn artifact_list(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

pub fn cmd_ingest(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    let dir = command_dir(config, "ingest")?;
    let mut artifacts = write_bundle(&dir, &bundle.graph, None)?;
    let id_map = dir.join("id_map.csv");
    let rows: Vec<Vec<String>> = bundle
        .external_ids
        .iter()
        .enumerate()
        .map(|(node, id)| vec![id.clone(), node.to_string()])
        .collect();
    write_csv(&id_map, &["external_id", "node"], &rows)?;
    artifacts.push(id_map);
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "ingest",
        "n": bundle.graph.n(),
        "m": bundle.graph.m(),
        "duplicate_edges_collapsed": bundle.warnings.duplicate_edges,
        "self_loops_dropped": bundle.warnings.self_loops,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_stats(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let attributes: Vec<&str> = config.stats.attributes.iter().map(String::as_str).collect();
    let report = stats_report(&bundle.graph, &attributes)?;
    let dir = command_dir(config, "stats")?;
    let stats_path = dir.join("stats.json");
    write_json(&stats_path, &report)?;
    let degree_path = dir.join("degree.csv");
    let degree_rows: Vec<Vec<String>> = report
        .degree_distribution
        .counts
        .iter()
        .map(|(k, c)| vec![k.to_string(), c.to_string()])
        .collect();
    write_csv(&degree_path, &["k", "count"], &degree_rows)?;
    let knn_path = dir.join("knn.csv");
    let knn_rows: Vec<Vec<String>> =
        report.knn.iter().map(|(k, v)| vec![k.to_string(), fmt_f64(*v)]).collect();
    write_csv(&knn_path, &["k", "knn"], &knn_rows)?;
    let artifacts = vec![stats_path, degree_path, knn_path];
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "stats",
        "n": report.n,
        "m": report.m,
        "triangles": report.triangles,
        "giant_component": report.giant_component,
        "isolates": report.isolates,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_compare(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let left = read_bundle(config.require_graph()?)?;
    let right = read_bundle(config.require_graph_b()?)?;
    reject_missing(&left, None)?;
    reject_missing(&right, None)?;
    let attributes: Vec<&str> = config.stats.attributes.iter().map(String::as_str).collect();
    let comparison = compare_stats(&left.graph, &right.graph, &attributes)?;
    let dir = command_dir(config, "compare")?;
    let json_path = dir.join("compare.json");
    write_json(&json_path, &comparison)?;
    let degree_path = dir.join("degree_compare.csv");
    let rows: Vec<Vec<String>> = comparison
        .degree_histogram
        .iter()
        .map(|&(k, l, r)| vec![k.to_string(), l.to_string(), r.to_string()])
        .collect();
    write_csv(&degree_path, &["k", "left", "right"], &rows)?;
    let artifacts = vec![json_path, degree_path];
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "compare",
        "delta_m": comparison.deltas.m,
        "delta_triangles": comparison.deltas.triangles,
        "delta_mean_degree": comparison.deltas.mean_degree,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_sample(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let seed = derive_seed(config.seed, "sample");
    let block = &config.sample;
    let sample: SubgraphSample = match block.kind.as_str() {
        "star" => star_sample(&bundle.graph, &block.seeds)?,
        "neighborhood" => neighborhood_sample(&bundle.graph, &block.seeds)?,
        "snowball" => snowball_sample(&bundle.graph, &block.seeds, block.waves)?,
        "random-walk" => {
            random_walk_batch(&bundle.graph, block.roots, block.walk_length, seed)?
        }
        other => return Err(CliError::Config(format!("unknown sample kind `{other}`"))),
    };
    let dir = command_dir(config, "sample")?;
    let external: Vec<String> = sample
        .node_ids
        .iter()
        .map(|&old| bundle.external_ids[old].clone())
        .collect();
    let mut artifacts = write_bundle(&dir, &sample.graph, Some(&external))?;
    let sidecar = dir.join("sample.json");
    write_json(
        &sidecar,
        &json!({
            "kind": sample.kind,
            "seeds": sample.seeds,
            "wave_sizes": sample.wave_sizes,
            "nodes": sample.node_ids.len(),
            "edges": sample.graph.m(),
        }),
    )?;
    artifacts.push(sidecar);
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "sample",
        "kind": block.kind,
        "nodes": sample.node_ids.len(),
        "edges": sample.graph.m(),
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_train_nodeclass(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let block = &config.train_nodeclass;
    if block.target.is_empty() {
        return Err(CliError::Config("`train_nodeclass.target` missing".into()));
    }
    let train_config = TrainClassifierConfig {
        arch: block.arch,
        hidden_dims: block.hidden_dims.clone(),
        epochs: block.epochs,
        learning_rate: block.learning_rate,
        train_frac: block.train_frac,
        split_seed: derive_seed(config.seed, "train-nodeclass/split"),
        walk_roots: block.walk_roots,
        walk_length: block.walk_length,
        batch_size: block.batch_size,
        seed: derive_seed(config.seed, "train-nodeclass/init"),
    };
    let (model, curve) = train_classifier(&bundle.graph, &block.target, &train_config)?;

    // held-out evaluation on the test-node induced subgraph
    let split = split_nodes(&bundle.graph, block.train_frac, train_config.split_seed)?;
    let test_graph = synthnet_core::graph::induced_subgraph(&bundle.graph, &split.test_nodes)?;
    let all_test: Vec<usize> = (0..test_graph.n()).collect();
    let report = evaluate_classifier(&model, &test_graph, &all_test)?;

    let dir = command_dir(config, "train-nodeclass")?;
    let model_path = dir.join("model.json");
    write_model(&model_path, &ModelFile::Classifier(model))?;
    let curve_path = dir.join("curve.csv");
    let rows: Vec<Vec<String>> = curve
        .iter()
        .enumerate()
        .map(|(epoch, loss)| vec![epoch.to_string(), fmt_f64(*loss)])
        .collect();
    write_csv(&curve_path, &["epoch", "loss"], &rows)?;
    let eval_path = dir.join("eval.json");
    write_json(&eval_path, &report)?;
    let artifacts = vec![model_path, curve_path, eval_path];
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "train-nodeclass",
        "target": block.target,
        "epochs": curve.len(),
        "test_accuracy": report.accuracy,
        "test_loss": report.loss,
        "train_train_edge_fraction": split.edge_class_fractions.0,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_impute(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let ModelFile::Classifier(model) = read_model(config.require_model()?)? else {
        return Err(CliError::Config("`impute` needs a classifier model file".into()));
    };
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, Some(&model.target))?;
    let missing = bundle.missing.get(&model.target).cloned().unwrap_or_default();
    let completed = impute_node_attribute(&model, &bundle.graph, &missing)?;
    let completed_graph = synthnet_core::graph::build_graph(
        completed,
        bundle.graph.edge_list().clone(),
    )?;
    let dir = command_dir(config, "impute")?;
    let artifacts = write_bundle(&dir, &completed_graph, Some(&bundle.external_ids))?;
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "impute",
        "target": model.target,
        "imputed_nodes": missing.len(),
        "artifacts": artifact_list(&artifacts),
    }))
}

fn resolve_target_mixing(
    graph: &AttributedGraph,
    attribute: &str,
    target: &MixingTarget,
) -> CliResult<Vec<Vec<f64>>> {
    match target {
        MixingTarget::Observed => {
            Ok(mixing_matrix(graph, attribute, MixingMode::Joint)?.entries)
        }
        MixingTarget::Uniform => {
            let (_, spec) = graph
                .nodes()
                .schema()
                .column(attribute)
                .ok_or_else(|| CliError::Schema(format!("no column `{attribute}`")))?;
            let synthnet_core::graph::ColumnKind::Categorical { levels } = &spec.kind else {
                return Err(CliError::Schema(format!("column `{attribute}` is not categorical")));
            };
            let l = levels.len();
            let cells = (l * (l + 1) / 2) as f64;
            let mut matrix = vec![vec![0.0; l]; l];
            for (a, row) in matrix.iter_mut().enumerate() {
                for cell in row.iter_mut().skip(a) {
                    *cell = 1.0 / cells;
                }
            }
            Ok(matrix)
        }
        MixingTarget::File(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

pub fn cmd_train_linkpred(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let block = &config.train_linkpred;
    let target_mixing = match (&block.mixing_attribute, block.lambda > 0.0) {
        (Some(attribute), true) => {
            Some(resolve_target_mixing(&bundle.graph, attribute, &block.mixing_target)?)
        }
        _ => None,
    };
    let gae_seed = derive_seed(config.seed, "train-linkpred");
    let train_config = TrainGaeConfig {
        arch: block.arch,
        hidden_dims: block.hidden_dims.clone(),
        output_dim: block.output_dim,
        epochs: block.epochs,
        learning_rate: block.learning_rate,
        edge_split_frac: block.edge_split_frac,
        negatives_per_positive: block.negatives_per_positive,
        walk_roots: block.walk_roots,
        walk_length: block.walk_length,
        lambda: block.lambda,
        mixing_attribute: block.mixing_attribute.clone(),
        target_mixing,
        mixing_pairs_per_batch: block.mixing_pairs_per_batch,
        seed: gae_seed,
    };
    let (model, curve) = train_gae(&bundle.graph, &train_config)?;

    // held-out evaluation: test positives vs fresh uniform negatives,
    // embeddings from the train graph
    let split = split_edges(&bundle.graph, block.edge_split_frac, gae_seed)?;
    let train_graph = synthnet_core::graph::build_graph(
        bundle.graph.nodes().clone(),
        synthnet_core::graph::EdgeList::from_pairs(split.train_edges.clone()),
    )?;
    let negatives = synthnet_core::sample::sample_negative_edges(
        &bundle.graph,
        split.test_edges.len(),
        derive_seed(config.seed, "train-linkpred/eval-negatives"),
        &[],
    )?;
    let report = evaluate_link_predictor(&model, &train_graph, &split.test_edges, &negatives)?;

    let dir = command_dir(config, "train-linkpred")?;
    let model_path = dir.join("model.json");
    write_model(&model_path, &ModelFile::Gae(model))?;
    let curve_path = dir.join("curve.csv");
    let rows: Vec<Vec<String>> = curve
        .iter()
        .enumerate()
        .map(|(epoch, e)| {
            vec![
                epoch.to_string(),
                fmt_f64(e.loss),
                fmt_f64(e.auc),
                fmt_f64(e.average_precision),
            ]
        })
        .collect();
    write_csv(&curve_path, &["epoch", "loss", "auc", "ap"], &rows)?;
    let eval_path = dir.join("eval.json");
    write_json(&eval_path, &report)?;
    let roc_path = dir.join("roc.csv");
    let roc_rows: Vec<Vec<String>> =
        report.roc.iter().map(|&(fpr, tpr)| vec![fmt_f64(fpr), fmt_f64(tpr)]).collect();
    write_csv(&roc_path, &["fpr", "tpr"], &roc_rows)?;
    let artifacts = vec![model_path, curve_path, eval_path, roc_path];
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "train-linkpred",
        "epochs": curve.len(),
        "test_auc": report.auc,
        "test_ap": report.average_precision,
        "test_loss": report.loss,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_gen_attrs(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let block = &config.gen_attrs;
    let table = bundle.graph.nodes();
    let (model, curve) = match block.mode.as_str() {
        "marginal" => (fit_marginal(table)?, Vec::new()),
        "empirical" => (fit_empirical(table)?, Vec::new()),
        "adversarial" => {
            let adv_config = AdversarialConfig {
                latent_dim: block.latent_dim,
                hidden_dims: block.hidden_dims.clone(),
                steps: block.steps,
                batch_size: block.batch_size,
                learning_rate: block.learning_rate,
                seed: derive_seed(config.seed, "gen-attrs/train"),
            };
            fit_adversarial(table, &adv_config)?
        }
        other => return Err(CliError::Config(format!("unknown gen-attrs mode `{other}`"))),
    };
    let population = sample_population(&model, block.n, derive_seed(config.seed, "gen-attrs"))?;
    let fidelity = compare_marginals(table, &population)?;
    let max_tv = fidelity.iter().map(|c| c.tv_distance).fold(0.0f64, f64::max);

    let dir = command_dir(config, "gen-attrs")?;
    let model_path = dir.join("tabmodel.json");
    write_model(&model_path, &ModelFile::Tabular(model))?;
    let nodes_path = dir.join("nodes.csv");
    write_nodes_csv(&nodes_path, &population, None)?;
    let schema_path = dir.join("schema.json");
    write_json(&schema_path, &SchemaFile { node: population.schema().clone(), edge: None })?;
    let mut artifacts = vec![model_path, nodes_path, schema_path];
    if !curve.is_empty() {
        let curve_path = dir.join("curve.csv");
        let rows: Vec<Vec<String>> = curve
            .iter()
            .enumerate()
            .map(|(step, &(d, g))| vec![step.to_string(), fmt_f64(d), fmt_f64(g)])
            .collect();
        write_csv(&curve_path, &["step", "discriminator_loss", "generator_loss"], &rows)?;
        artifacts.push(curve_path);
    }
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "gen-attrs",
        "mode": block.mode,
        "rows": block.n,
        "max_column_tv": max_tv,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_generate(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let population_paths = config
        .population
        .as_ref()
        .ok_or_else(|| CliError::Config("`population` paths missing".into()))?;
    let population = read_population(&population_paths.nodes, &population_paths.schema)?;
    if !population.missing.is_empty() {
        return Err(CliError::Schema("population table has missing values".into()));
    }
    let ModelFile::Gae(gae) = read_model(config.require_model()?)? else {
        return Err(CliError::Config("`generate` needs a link-predictor model file".into()));
    };
    let block = &config.generate;
    let target_edges = match (block.target_edges, block.reference) {
        (Some(m), _) => m,
        (None, Some(reference)) => {
            target_edge_count(population.table.len(), reference.nodes, reference.edges)?
        }
        (None, None) => {
            return Err(CliError::Config(
                "`generate` needs `target_edges` or `reference`".into(),
            ))
        }
    };
    let chain_config = ChainConfig {
        iterations: block.iterations,
        batch_size: block.batch_size,
        target_edges,
        refresh_every: block.refresh_every,
        record_states: false,
        seed: derive_seed(config.seed, "generate"),
    };
    let (graph, history) = generate_graph(&population.table, &gae, &chain_config)?;
    let diagnostics = if history.records.is_empty() {
        None
    } else {
        Some(chain_diagnostics(&history)?)
    };

    let dir = command_dir(config, "generate")?;
    let mut artifacts = write_bundle(&dir, &graph, None)?;
    let chain_path = dir.join("chain.csv");
    let rows: Vec<Vec<String>> = history
        .records
        .iter()
        .map(|rec| {
            vec![
                rec.iteration.to_string(),
                match rec.kind {
                    synthnet_core::generate::StepKind::Add => "add".to_string(),
                    synthnet_core::generate::StepKind::Delete => "delete".to_string(),
                },
                rec.proposals.to_string(),
                rec.accepts.to_string(),
                rec.edges_after.to_string(),
            ]
        })
        .collect();
    write_csv(&chain_path, &["iteration", "kind", "proposals", "accepts", "edges"], &rows)?;
    artifacts.push(chain_path);
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "generate",
        "n": graph.n(),
        "m": graph.m(),
        "target_edges": target_edges,
        "iterations": history.records.len(),
        "diagnostics": diagnostics,
        "artifacts": artifact_list(&artifacts),
    }))
}

/// fit.json: the spec's terms next to the fitted coefficients.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct ErgmFitFile {
    pub terms: Vec<synthnet_core::ergm::TermKind>,
    pub fit: ErgmFit,
}

fn ergm_spec(config: &WorkspaceConfig) -> CliResult<ErgmSpec> {
    Ok(ErgmSpec::new(config.ergm.terms.clone())?)
}

fn ergm_theta(config: &WorkspaceConfig, spec: &ErgmSpec) -> CliResult<Vec<f64>> {
    if let Some(theta) = &config.ergm.theta {
        return Ok(theta.clone());
    }
    if let Some(path) = &config.ergm.fit_file {
        let text = std::fs::read_to_string(path)?;
        let file: ErgmFitFile = serde_json::from_str(&text)?;
        if file.terms != spec.terms {
            return Err(CliError::Config(format!(
                "fit file {} was fitted for different terms",
                path.display()
            )));
        }
        return Ok(file.fit.theta);
    }
    Err(CliError::Config("provide `ergm.theta` or `ergm.fit_file`".into()))
}

pub fn cmd_ergm_fit(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let spec = ergm_spec(config)?;
    let block = &config.ergm.mple;
    let mple_config = MpleConfig {
        max_iterations: block.max_iterations,
        tolerance: block.tolerance,
        dyad_node_cap: block.dyad_node_cap,
        dyad_sample: block.dyad_sample,
        edge_balanced: block.edge_balanced,
        seed: derive_seed(config.seed, "ergm-fit"),
    };
    let fit = mple_fit(&bundle.graph, &spec, &mple_config)?;
    let observed = sufficient_statistics(&bundle.graph, &spec)?;
    let dir = command_dir(config, "ergm-fit")?;
    let fit_path = dir.join("fit.json");
    write_json(&fit_path, &ErgmFitFile { terms: spec.terms.clone(), fit: fit.clone() })?;
    let artifacts = vec![fit_path];
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "ergm-fit",
        "theta": fit.theta,
        "converged": fit.converged,
        "degenerate": fit.degenerate,
        "observed_statistics": observed,
        "artifacts": artifact_list(&artifacts),
    }))
}

fn mcmc_config(config: &WorkspaceConfig, label: &str) -> McmcConfig {
    let block = &config.ergm.mcmc;
    McmcConfig {
        proposal: block.proposal,
        steps: block.steps,
        burn_in: block.burn_in,
        thin: block.thin,
        seed: derive_seed(config.seed, label),
    }
}

pub fn cmd_ergm_sim(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let spec = ergm_spec(config)?;
    let theta = ergm_theta(config, &spec)?;
    let run = mcmc_sample(&bundle.graph, &spec, &theta, &mcmc_config(config, "ergm-sim"))?;
    let dir = command_dir(config, "ergm-sim")?;
    let trace_path = dir.join("trace.csv");
    let mut header = vec!["step".to_string()];
    header.extend(spec.terms.iter().enumerate().map(|(i, _)| format!("term_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..run.trace.len())
        .map(|step| {
            let mut row = vec![step.to_string()];
            row.extend(run.trace.row(step).iter().map(|&v| fmt_f64(v)));
            row
        })
        .collect();
    write_csv(&trace_path, &header_refs, &rows)?;
    let mut artifacts = vec![trace_path];
    if let Some(last) = run.samples.last() {
        let sample_dir = dir.join("last_sample");
        artifacts.extend(write_bundle(&sample_dir, last, None)?);
    }
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "ergm-sim",
        "samples": run.samples.len(),
        "acceptance_rate": run.acceptance_rate,
        "artifacts": artifact_list(&artifacts),
    }))
}

pub fn cmd_ergm_gof(config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    let bundle = read_bundle(config.require_graph()?)?;
    reject_missing(&bundle, None)?;
    let spec = ergm_spec(config)?;
    let theta = ergm_theta(config, &spec)?;
    let report = gof_degree(
        &bundle.graph,
        &spec,
        &theta,
        &GofConfig { mcmc: mcmc_config(config, "ergm-gof") },
    )?;
    let dir = command_dir(config, "ergm-gof")?;
    let gof_path = dir.join("gof.csv");
    let rows: Vec<Vec<String>> = report
        .degrees
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            vec![
                k.to_string(),
                report.reference_counts[idx].to_string(),
                fmt_f64(report.p05[idx]),
                fmt_f64(report.p50[idx]),
                fmt_f64(report.p95[idx]),
            ]
        })
        .collect();
    write_csv(&gof_path, &["degree", "reference", "p05", "p50", "p95"], &rows)?;
    let artifacts = vec![gof_path];
    validate_artifacts(&artifacts)?;
    Ok(json!({
        "command": "ergm-gof",
        "samples": report.samples_used,
        "artifacts": artifact_list(&artifacts),
    }))
}

/// Dispatch a named command.
pub fn run(command: &str, config: &WorkspaceConfig) -> CliResult<serde_json::Value> {
    match command {
        "ingest" => cmd_ingest(config),
        "stats" => cmd_stats(config),
        "compare" => cmd_compare(config),
        "sample" => cmd_sample(config),
        "train-nodeclass" => cmd_train_nodeclass(config),
        "impute" => cmd_impute(config),
        "train-linkpred" => cmd_train_linkpred(config),
        "gen-attrs" => cmd_gen_attrs(config),
        "generate" => cmd_generate(config),
        "ergm-fit" => cmd_ergm_fit(config),
        "ergm-sim" => cmd_ergm_sim(config),
        "ergm-gof" => cmd_ergm_gof(config),
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}
