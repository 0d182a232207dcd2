//! Model input encoding: categorical columns one-hot, continuous columns
//! min-max scaled to [0, 1] with statistics taken from the fitting rows
//! (the train split). Values outside the fitted range are clamped.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::graph::{Column, ColumnKind, NodeTable};

/// How one input column is encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnEncoding {
    /// One-hot block of the given width.
    OneHot { levels: usize },
    /// `(x - min) / (max - min)`, clamped to [0, 1]. A degenerate column
    /// (`max == min`) encodes to 0.
    MinMax { min: f64, max: f64 },
}

impl ColumnEncoding {
    fn width(&self) -> usize {
        match self {
            ColumnEncoding::OneHot { levels } => *levels,
            ColumnEncoding::MinMax { .. } => 1,
        }
    }
}

/// Fitted encoding spec: the excluded target (if any) plus, per remaining
/// column, its name and encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEncoding {
    pub exclude: Option<String>,
    pub columns: Vec<(String, ColumnEncoding)>,
}

impl InputEncoding {
    /// Encoded feature width.
    pub fn width(&self) -> usize {
        self.columns.iter().map(|(_, e)| e.width()).sum()
    }
}

/// Fit an encoding over `table`, optionally excluding a target column and
/// optionally restricting the continuous min/max statistics to `fit_rows`.
pub fn fit_encoding(
    table: &NodeTable,
    exclude: Option<&str>,
    fit_rows: Option<&[usize]>,
) -> Result<InputEncoding> {
    if let Some(name) = exclude {
        if table.schema().column(name).is_none() {
            return Err(Error::SchemaError(format!("no column `{name}` to exclude")));
        }
    }
    let mut columns = Vec::new();
    for (spec, col) in table.schema().columns.iter().zip(table.columns()) {
        if Some(spec.name.as_str()) == exclude {
            continue;
        }
        let encoding = match (&spec.kind, col) {
            (ColumnKind::Categorical { levels }, Column::Categorical(_)) => {
                ColumnEncoding::OneHot { levels: levels.len() }
            }
            (ColumnKind::Continuous { min, max }, Column::Continuous(values)) => {
                let (lo, hi) = match fit_rows {
                    Some(rows) if !rows.is_empty() => {
                        let mut lo = f64::INFINITY;
                        let mut hi = f64::NEG_INFINITY;
                        for &r in rows {
                            if r >= values.len() {
                                return Err(Error::IndexError { index: r, len: values.len() });
                            }
                            lo = lo.min(values[r]);
                            hi = hi.max(values[r]);
                        }
                        (lo, hi)
                    }
                    _ => (*min, *max),
                };
                ColumnEncoding::MinMax { min: lo, max: hi }
            }
            _ => unreachable!("NodeTable validated storage against schema"),
        };
        columns.push((spec.name.clone(), encoding));
    }
    Ok(InputEncoding { exclude: exclude.map(|s| s.to_string()), columns })
}

/// Encode every row of `table` under a fitted encoding. The table must
/// carry every encoded column with a compatible kind.
pub fn encode_features(table: &NodeTable, encoding: &InputEncoding) -> Result<Tensor> {
    let n = table.len();
    let width = encoding.width();
    let mut out = Tensor::zeros(n, width);
    let mut offset = 0usize;
    for (name, col_enc) in &encoding.columns {
        let (idx, spec) = table
            .schema()
            .column(name)
            .ok_or_else(|| Error::SchemaError(format!("table lacks encoded column `{name}`")))?;
        match (col_enc, &spec.kind, &table.columns()[idx]) {
            (
                ColumnEncoding::OneHot { levels },
                ColumnKind::Categorical { levels: schema_levels },
                Column::Categorical(values),
            ) => {
                if schema_levels.len() != *levels {
                    return Err(Error::SchemaError(format!(
                        "column `{name}` has {} levels, encoding expects {levels}",
                        schema_levels.len()
                    )));
                }
                for (row, &v) in values.iter().enumerate() {
                    out.set(row, offset + v as usize, 1.0);
                }
            }
            (ColumnEncoding::MinMax { min, max }, ColumnKind::Continuous { .. }, Column::Continuous(values)) => {
                let span = max - min;
                for (row, &v) in values.iter().enumerate() {
                    let scaled = if span > 0.0 { ((v - min) / span).clamp(0.0, 1.0) } else { 0.0 };
                    out.set(row, offset, scaled);
                }
            }
            _ => {
                return Err(Error::SchemaError(format!(
                    "column `{name}` kind does not match its encoding"
                )))
            }
        }
        offset += col_enc.width();
    }
    Ok(out)
}
