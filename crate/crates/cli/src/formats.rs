//! On-disk formats: graph bundles (nodes.csv + edges.csv + schema.json),
//! model files, and the CSV artifact writers.
//!
//! CSVs are UTF-8, comma-separated, header row mandatory, quoted only when
//! needed. Floating values are written with fixed 17-significant-digit
//! scientific notation so artifacts are byte-identical across runs.
//! Missing values are encoded as empty fields and are legal only where a
//! command's contract permits (the imputation target column).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use synthnet_core::graph::{
    build_graph, AttributedGraph, Column, ColumnKind, EdgeList, FeatureSchema, NodeTable,
};
use synthnet_core::tabgen::TabularModel;
use synthnet_core::tasks::{ClassifierModel, GaeModel};

use crate::config::BundlePaths;
use crate::error::{CliError, CliResult};

/// 17-significant-digit scientific formatting: lossless for `f64` and
/// byte-stable.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// schema.json: the node schema plus an optional edge-feature schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaFile {
    pub node: FeatureSchema,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<FeatureSchema>,
}

/// Ingestion tallies.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestWarnings {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// A bundle read into memory: the graph, the external-id map
/// (`external_ids[node] == external id`), cleanup tallies, and any missing
/// cells per column.
#[derive(Debug, Clone)]
pub struct LoadedBundle {
    pub graph: AttributedGraph,
    pub external_ids: Vec<String>,
    pub warnings: IngestWarnings,
    /// column name -> rows whose cell was empty
    pub missing: BTreeMap<String, Vec<usize>>,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn parse_cell(
    spec_kind: &ColumnKind,
    cell: &str,
    path: &Path,
    line: usize,
    name: &str,
) -> CliResult<(Option<u32>, Option<f64>)> {
    match spec_kind {
        ColumnKind::Categorical { levels } => {
            let idx = levels
                .iter()
                .position(|l| l == cell)
                .ok_or_else(|| parse_error(path, line, format!("`{cell}` is not a level of `{name}`")))?;
            Ok((Some(idx as u32), None))
        }
        ColumnKind::Continuous { .. } => {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(path, line, format!("`{cell}` is not a number in `{name}`")))?;
            Ok((None, Some(v)))
        }
    }
}

/// A node table read from disk, with external ids and missing cells.
pub struct LoadedTable {
    pub table: NodeTable,
    pub external_ids: Vec<String>,
    pub index_of: BTreeMap<String, usize>,
    pub missing: BTreeMap<String, Vec<usize>>,
}

fn read_nodes(path: &Path, schema: &FeatureSchema) -> CliResult<LoadedTable> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(parse_error(path, 1, "empty header"));
    }
    let mut column_of = Vec::new();
    for (pos, header) in headers.iter().enumerate().skip(1) {
        let Some((idx, _)) = schema.column(header) else {
            return Err(CliError::Schema(format!(
                "unknown column `{header}` in {}",
                path.display()
            )));
        };
        column_of.push((pos, idx));
    }
    if column_of.len() != schema.len() {
        return Err(CliError::Schema(format!(
            "{} lists {} of the schema's {} columns",
            path.display(),
            column_of.len(),
            schema.len()
        )));
    }

    let mut external_ids: Vec<String> = Vec::new();
    let mut index_of: BTreeMap<String, usize> = BTreeMap::new();
    let mut cats: Vec<Vec<u32>> = vec![Vec::new(); schema.len()];
    let mut conts: Vec<Vec<f64>> = vec![Vec::new(); schema.len()];
    let mut missing: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (row_idx, record) in reader.records().enumerate() {
        let line = row_idx + 2;
        let record = record?;
        let id = record
            .get(0)
            .ok_or_else(|| parse_error(path, line, "missing id"))?
            .to_string();
        if id.is_empty() {
            return Err(parse_error(path, line, "empty external id"));
        }
        if index_of.insert(id.clone(), external_ids.len()).is_some() {
            return Err(parse_error(path, line, format!("duplicate external id `{id}`")));
        }
        let node = external_ids.len();
        external_ids.push(id);
        for &(pos, idx) in &column_of {
            let spec = &schema.columns[idx];
            let cell =
                record.get(pos).ok_or_else(|| parse_error(path, line, "short row"))?;
            if cell.is_empty() {
                // placeholder; the command decides whether missing cells
                // are legal here
                missing.entry(spec.name.clone()).or_default().push(node);
                match &spec.kind {
                    ColumnKind::Categorical { .. } => cats[idx].push(0),
                    ColumnKind::Continuous { min, .. } => conts[idx].push(*min),
                }
                continue;
            }
            let (cat, cont) = parse_cell(&spec.kind, cell, path, line, &spec.name)?;
            if let Some(v) = cat {
                cats[idx].push(v);
            }
            if let Some(v) = cont {
                conts[idx].push(v);
            }
        }
    }
    let n = external_ids.len();
    let columns: Vec<Column> = schema
        .columns
        .iter()
        .enumerate()
        .map(|(idx, spec)| match spec.kind {
            ColumnKind::Categorical { .. } => Column::Categorical(std::mem::take(&mut cats[idx])),
            ColumnKind::Continuous { .. } => Column::Continuous(std::mem::take(&mut conts[idx])),
        })
        .collect();
    let table = NodeTable::new(n, schema.clone(), columns)?;
    Ok(LoadedTable { table, external_ids, index_of, missing })
}

/// Read a population table (nodes.csv + schema.json, no edges).
pub fn read_population(nodes: &Path, schema: &Path) -> CliResult<LoadedTable> {
    let schema_text = fs::read_to_string(schema)?;
    let schema_file: SchemaFile = serde_json::from_str(&schema_text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", schema.display())))?;
    schema_file.node.validate()?;
    read_nodes(nodes, &schema_file.node)
}

/// Read and validate a bundle. External ids are densified in file order;
/// duplicate edges collapse (keeping the first occurrence's features) and
/// self-loops drop, both counted.
pub fn read_bundle(paths: &BundlePaths) -> CliResult<LoadedBundle> {
    let schema_text = fs::read_to_string(&paths.schema)?;
    let schema_file: SchemaFile = serde_json::from_str(&schema_text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", paths.schema.display())))?;
    schema_file.node.validate()?;
    if let Some(edge_schema) = &schema_file.edge {
        edge_schema.validate()?;
    }

    let LoadedTable { table, external_ids, index_of, missing } =
        read_nodes(&paths.nodes, &schema_file.node)?;

    // --- edges.csv ---
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(&paths.edges)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(parse_error(&paths.edges, 1, "need at least src and dst columns"));
    }
    let edge_schema = schema_file.edge.clone();
    let mut edge_column_of = Vec::new();
    if let Some(eschema) = &edge_schema {
        for (pos, header) in headers.iter().enumerate().skip(2) {
            let Some((idx, _)) = eschema.column(header) else {
                return Err(CliError::Schema(format!(
                    "unknown edge column `{header}` in {}",
                    paths.edges.display()
                )));
            };
            edge_column_of.push((pos, idx));
        }
        if edge_column_of.len() != eschema.len() {
            return Err(CliError::Schema(format!(
                "{} lists {} of the edge schema's {} columns",
                paths.edges.display(),
                edge_column_of.len(),
                eschema.len()
            )));
        }
    } else if headers.len() > 2 {
        return Err(CliError::Schema(format!(
            "{} carries edge columns but schema.json declares none",
            paths.edges.display()
        )));
    }

    let mut warnings = IngestWarnings::default();
    let mut seen = std::collections::BTreeSet::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut ecats: Vec<Vec<u32>> =
        vec![Vec::new(); edge_schema.as_ref().map_or(0, FeatureSchema::len)];
    let mut econts: Vec<Vec<f64>> =
        vec![Vec::new(); edge_schema.as_ref().map_or(0, FeatureSchema::len)];
    for (row_idx, record) in reader.records().enumerate() {
        let line = row_idx + 2;
        let record = record?;
        let src_id = record.get(0).ok_or_else(|| parse_error(&paths.edges, line, "missing src"))?;
        let dst_id = record.get(1).ok_or_else(|| parse_error(&paths.edges, line, "missing dst"))?;
        let &src = index_of
            .get(src_id)
            .ok_or_else(|| parse_error(&paths.edges, line, format!("unknown node `{src_id}`")))?;
        let &dst = index_of
            .get(dst_id)
            .ok_or_else(|| parse_error(&paths.edges, line, format!("unknown node `{dst_id}`")))?;
        if src == dst {
            warnings.self_loops += 1;
            continue;
        }
        let pair = if src < dst { (src, dst) } else { (dst, src) };
        if !seen.insert(pair) {
            warnings.duplicate_edges += 1;
            continue;
        }
        pairs.push(pair);
        if let Some(eschema) = &edge_schema {
            for &(pos, idx) in &edge_column_of {
                let spec = &eschema.columns[idx];
                let cell = record
                    .get(pos)
                    .ok_or_else(|| parse_error(&paths.edges, line, "short row"))?;
                if cell.is_empty() {
                    return Err(parse_error(
                        &paths.edges,
                        line,
                        format!("missing value in edge column `{}`", spec.name),
                    ));
                }
                let (cat, cont) = parse_cell(&spec.kind, cell, &paths.edges, line, &spec.name)?;
                if let Some(v) = cat {
                    ecats[idx].push(v);
                }
                if let Some(v) = cont {
                    econts[idx].push(v);
                }
            }
        }
    }
    let features = edge_schema.as_ref().map(|eschema| {
        eschema
            .columns
            .iter()
            .enumerate()
            .map(|(idx, spec)| match spec.kind {
                ColumnKind::Categorical { .. } => {
                    Column::Categorical(std::mem::take(&mut ecats[idx]))
                }
                ColumnKind::Continuous { .. } => {
                    Column::Continuous(std::mem::take(&mut econts[idx]))
                }
            })
            .collect()
    });
    let graph = build_graph(
        table,
        EdgeList { edges: pairs, feature_schema: edge_schema, features },
    )?;
    Ok(LoadedBundle { graph, external_ids, warnings, missing })
}

fn level_name(schema: &FeatureSchema, column: usize, level: u32) -> &str {
    match &schema.columns[column].kind {
        ColumnKind::Categorical { levels } => &levels[level as usize],
        ColumnKind::Continuous { .. } => unreachable!("level_name on a continuous column"),
    }
}

/// Write nodes.csv for a table. `external_ids` defaults to the dense node
/// indices.
pub fn write_nodes_csv(
    path: &Path,
    table: &NodeTable,
    external_ids: Option<&[String]>,
) -> CliResult<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path)?;
    let mut header = vec!["id".to_string()];
    header.extend(table.schema().columns.iter().map(|c| c.name.clone()));
    writer.write_record(&header)?;
    for row in 0..table.len() {
        let mut record = Vec::with_capacity(header.len());
        record.push(match external_ids {
            Some(ids) => ids[row].clone(),
            None => row.to_string(),
        });
        for (idx, col) in table.columns().iter().enumerate() {
            record.push(match col {
                Column::Categorical(values) => {
                    level_name(table.schema(), idx, values[row]).to_string()
                }
                Column::Continuous(values) => fmt_f64(values[row]),
            });
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write edges.csv (src, dst, then any edge-feature columns).
pub fn write_edges_csv(
    path: &Path,
    graph: &AttributedGraph,
    external_ids: Option<&[String]>,
) -> CliResult<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path)?;
    let edge_list = graph.edge_list();
    let mut header = vec!["src".to_string(), "dst".to_string()];
    if let Some(eschema) = &edge_list.feature_schema {
        header.extend(eschema.columns.iter().map(|c| c.name.clone()));
    }
    writer.write_record(&header)?;
    let id_of = |v: usize| match external_ids {
        Some(ids) => ids[v].clone(),
        None => v.to_string(),
    };
    for (edge_idx, &(u, v)) in graph.edges().iter().enumerate() {
        let mut record = vec![id_of(u), id_of(v)];
        if let (Some(eschema), Some(features)) = (&edge_list.feature_schema, &edge_list.features) {
            for (idx, col) in features.iter().enumerate() {
                record.push(match col {
                    Column::Categorical(values) => {
                        level_name(eschema, idx, values[edge_idx]).to_string()
                    }
                    Column::Continuous(values) => fmt_f64(values[edge_idx]),
                });
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write a complete bundle into `dir` (nodes.csv, edges.csv, schema.json).
pub fn write_bundle(
    dir: &Path,
    graph: &AttributedGraph,
    external_ids: Option<&[String]>,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let nodes = dir.join("nodes.csv");
    let edges = dir.join("edges.csv");
    let schema = dir.join("schema.json");
    write_nodes_csv(&nodes, graph.nodes(), external_ids)?;
    write_edges_csv(&edges, graph, external_ids)?;
    let schema_file = SchemaFile {
        node: graph.nodes().schema().clone(),
        edge: graph.edge_list().feature_schema.clone(),
    };
    write_json(&schema, &schema_file)?;
    Ok(vec![nodes, edges, schema])
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Write a CSV from a header and stringified rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// A model file: the tagged union of everything trainable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "model")]
pub enum ModelFile {
    Classifier(ClassifierModel),
    Gae(GaeModel),
    Tabular(TabularModel),
}

pub fn write_model(path: &Path, model: &ModelFile) -> CliResult<()> {
    write_json(path, model)
}

pub fn read_model(path: &Path) -> CliResult<ModelFile> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Post-write validation: every declared artifact must exist, be nonempty,
/// and re-parse in its format.
pub fn validate_artifacts(paths: &[PathBuf]) -> CliResult<()> {
    for path in paths {
        let metadata = fs::metadata(path)
            .map_err(|e| CliError::Artifact(path.clone(), e.to_string()))?;
        if metadata.len() == 0 {
            return Err(CliError::Artifact(path.clone(), "empty file".into()));
        }
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Artifact(path.clone(), e.to_string()))?;
                serde_json::from_str::<serde_json::Value>(&text)
                    .map_err(|e| CliError::Artifact(path.clone(), e.to_string()))?;
            }
            Some("csv") => {
                let mut reader = csv::ReaderBuilder::new()
                    .from_path(path)
                    .map_err(|e| CliError::Artifact(path.clone(), e.to_string()))?;
                reader
                    .headers()
                    .map_err(|e| CliError::Artifact(path.clone(), e.to_string()))?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// Print the one-line JSON command summary to stdout.
pub fn print_summary(value: &serde_json::Value) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{value}")?;
    Ok(())
}
