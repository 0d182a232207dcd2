//! Generative models over node-attribute tables: an independent-marginal
//! sampler, an empirical-joint resampler, and a small adversarial tabular
//! generator.
//!
//! The marginal and empirical modes are exact and serve as the reliable
//! default for downstream graph generation; the adversarial mode trains a
//! generator/discriminator MLP pair on one-hot + min-max encoded rows with
//! alternating single steps and 0.9 label smoothing on real examples.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Adam, AdamConfig, Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::gnn::{
    build_forward, declare_params, init_model, param_bindings, Activation, Arch, GnnModel,
    GraphContext,
};
use crate::graph::{Column, ColumnKind, FeatureSchema, NodeTable};
use crate::math;

/// Histogram bins used for continuous columns in marginal mode.
pub const CONTINUOUS_BINS: usize = 64;

/// Fitted per-column distribution for the marginal sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalColumn {
    /// Empirical level pmf.
    Categorical { pmf: Vec<f64> },
    /// Fixed-width histogram over the observed range; samples draw a bin
    /// by mass and jitter uniformly inside it.
    Continuous { lo: f64, hi: f64, pmf: Vec<f64> },
}

/// A fitted tabular generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TabularModel {
    /// Independent per-column marginals (the product distribution).
    Marginal { schema: FeatureSchema, columns: Vec<MarginalColumn> },
    /// Uniform resampling (with replacement) of the source rows.
    Empirical { table: NodeTable },
    /// Generator/discriminator MLP pair over encoded rows.
    Adversarial {
        schema: FeatureSchema,
        generator: GnnModel,
        discriminator: GnnModel,
        latent_dim: usize,
        /// Observed (min, max) per continuous column, for decoding.
        continuous_ranges: Vec<(f64, f64)>,
    },
}

impl TabularModel {
    pub fn schema(&self) -> &FeatureSchema {
        match self {
            TabularModel::Marginal { schema, .. } => schema,
            TabularModel::Empirical { table } => table.schema(),
            TabularModel::Adversarial { schema, .. } => schema,
        }
    }
}

fn observed_range(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Fit per-column empirical pmfs (categorical) and 64-bin histograms
/// (continuous, over the observed range).
pub fn fit_marginal(table: &NodeTable) -> Result<TabularModel> {
    if table.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = table.len() as f64;
    let mut columns = Vec::new();
    for (spec, col) in table.schema().columns.iter().zip(table.columns()) {
        let marginal = match (&spec.kind, col) {
            (ColumnKind::Categorical { levels }, Column::Categorical(values)) => {
                let mut pmf = vec![0.0; levels.len()];
                for &v in values {
                    pmf[v as usize] += 1.0;
                }
                for p in &mut pmf {
                    *p /= n;
                }
                MarginalColumn::Categorical { pmf }
            }
            (ColumnKind::Continuous { .. }, Column::Continuous(values)) => {
                let (lo, hi) = observed_range(values);
                let span = hi - lo;
                let mut pmf = vec![0.0; CONTINUOUS_BINS];
                for &v in values {
                    let bin = if span > 0.0 {
                        (((v - lo) / span) * CONTINUOUS_BINS as f64) as usize
                    } else {
                        0
                    };
                    pmf[bin.min(CONTINUOUS_BINS - 1)] += 1.0;
                }
                for p in &mut pmf {
                    *p /= n;
                }
                MarginalColumn::Continuous { lo, hi, pmf }
            }
            _ => unreachable!("NodeTable validated storage against schema"),
        };
        columns.push(marginal);
    }
    Ok(TabularModel::Marginal { schema: table.schema().clone(), columns })
}

/// Store the rows for uniform resampling with replacement.
pub fn fit_empirical(table: &NodeTable) -> Result<TabularModel> {
    if table.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(TabularModel::Empirical { table: table.clone() })
}

/// Adversarial training configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialConfig {
    pub latent_dim: usize,
    pub hidden_dims: Vec<usize>,
    /// Alternating generator/discriminator step pairs.
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for AdversarialConfig {
    fn default() -> Self {
        AdversarialConfig {
            latent_dim: 4,
            hidden_dims: vec![32],
            steps: 3000,
            batch_size: 128,
            learning_rate: 1e-3,
            seed: 0,
        }
    }
}

/// Column block layout of the encoded row space.
fn block_layout(schema: &FeatureSchema) -> (usize, Vec<(usize, usize)>) {
    let mut offset = 0usize;
    let mut blocks = Vec::new();
    for spec in &schema.columns {
        let width = match &spec.kind {
            ColumnKind::Categorical { levels } => levels.len(),
            ColumnKind::Continuous { .. } => 1,
        };
        blocks.push((offset, width));
        offset += width;
    }
    (offset, blocks)
}

/// Encode rows for the discriminator: one-hot categoricals, min-max scaled
/// continuous values over the observed ranges.
fn encode_rows(table: &NodeTable, ranges: &[(f64, f64)]) -> Tensor {
    let (width, blocks) = block_layout(table.schema());
    let mut out = Tensor::zeros(table.len(), width);
    let mut cont_idx = 0usize;
    for ((spec, col), &(offset, _)) in
        table.schema().columns.iter().zip(table.columns()).zip(&blocks)
    {
        match (&spec.kind, col) {
            (ColumnKind::Categorical { .. }, Column::Categorical(values)) => {
                for (r, &v) in values.iter().enumerate() {
                    out.set(r, offset + v as usize, 1.0);
                }
            }
            (ColumnKind::Continuous { .. }, Column::Continuous(values)) => {
                let (lo, hi) = ranges[cont_idx];
                cont_idx += 1;
                let span = hi - lo;
                for (r, &v) in values.iter().enumerate() {
                    let scaled = if span > 0.0 { (v - lo) / span } else { 0.5 };
                    out.set(r, offset, scaled);
                }
            }
            _ => unreachable!(),
        }
    }
    out
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

/// Record the generator's raw output mapped into encoded-row space:
/// softmax per categorical block, sigmoid per continuous slot.
fn build_decoded_generator(
    tape: &mut Tape,
    raw: Var,
    schema: &FeatureSchema,
) -> Result<Var> {
    let (_, blocks) = block_layout(schema);
    let mut parts: Vec<Var> = Vec::new();
    for (spec, &(offset, width)) in schema.columns.iter().zip(&blocks) {
        let slice = tape.col_slice(raw, offset, width)?;
        let mapped = match spec.kind {
            ColumnKind::Categorical { .. } => tape.softmax_rows(slice),
            ColumnKind::Continuous { .. } => tape.sigmoid(slice),
        };
        parts.push(mapped);
    }
    tape.col_concat(&parts)
}

/// Train the two-player tabular model. Returns the model and the per-step
/// (discriminator, generator) losses.
pub fn fit_adversarial(
    table: &NodeTable,
    config: &AdversarialConfig,
) -> Result<(TabularModel, Vec<(f64, f64)>)> {
    if table.is_empty() {
        return Err(Error::EmptyData);
    }
    let schema = table.schema().clone();
    let (row_width, _) = block_layout(&schema);
    let continuous_ranges: Vec<(f64, f64)> = schema
        .columns
        .iter()
        .zip(table.columns())
        .filter_map(|(spec, col)| match (&spec.kind, col) {
            (ColumnKind::Continuous { .. }, Column::Continuous(values)) => {
                Some(observed_range(values))
            }
            _ => None,
        })
        .collect();
    let encoded = encode_rows(table, &continuous_ranges);

    // bounded generator activations and a low first-moment decay keep the
    // two players from saturating into a single mode
    let mut gen_dims = vec![config.latent_dim];
    gen_dims.extend_from_slice(&config.hidden_dims);
    gen_dims.push(row_width);
    let mut gen_acts = vec![Activation::Tanh; gen_dims.len() - 2];
    gen_acts.push(Activation::Identity);
    let mut generator = init_model(Arch::Mlp, &gen_dims, &gen_acts, config.seed)?;

    let mut disc_dims = vec![row_width];
    disc_dims.extend_from_slice(&config.hidden_dims);
    disc_dims.push(1);
    let mut disc_acts = vec![Activation::Relu; disc_dims.len() - 2];
    disc_acts.push(Activation::Identity);
    let mut discriminator = init_model(Arch::Mlp, &disc_dims, &disc_acts, config.seed ^ 0x5151)?;

    let optimizer_config = AdamConfig {
        learning_rate: config.learning_rate,
        beta1: 0.5,
        ..AdamConfig::default()
    };
    let mut adam_g = Adam::new(optimizer_config, &generator.param_shapes())?;
    let mut adam_d = Adam::new(optimizer_config, &discriminator.param_shapes())?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x42d6_a23f_9c11_77aa);
    let batch = config.batch_size.max(1);
    let mut curve = Vec::with_capacity(config.steps);

    for _ in 0..config.steps {
        // --- discriminator step ---
        let mut real = Tensor::zeros(batch, row_width);
        for r in 0..batch {
            let src = rng.random_range(0..table.len());
            for c in 0..row_width {
                real.set(r, c, encoded.get(src, c));
            }
        }
        let mut latent = Tensor::zeros(batch, config.latent_dim);
        for v in latent.data_mut() {
            *v = standard_normal(&mut rng);
        }

        let d_loss = {
            let mut tape = Tape::new();
            let real_var = tape.constant(real.clone());
            let z_var = tape.constant(latent.clone());
            let gen_params = declare_params(&mut tape, &generator);
            let disc_params = declare_params(&mut tape, &discriminator);
            let raw =
                build_forward(&mut tape, &generator, &gen_params, &GraphContext::None, z_var)?;
            let fake = build_decoded_generator(&mut tape, raw, &schema)?;
            let d_real = build_forward(
                &mut tape,
                &discriminator,
                &disc_params,
                &GraphContext::None,
                real_var,
            )?;
            let d_fake =
                build_forward(&mut tape, &discriminator, &disc_params, &GraphContext::None, fake)?;
            // real target 0.9 (label smoothing), fake target 0
            let neg_real = tape.scale(d_real, -1.0);
            let sp_neg_real = tape.softplus(neg_real);
            let sp_real = tape.softplus(d_real);
            let smooth_a = tape.scale(sp_neg_real, 0.9);
            let smooth_b = tape.scale(sp_real, 0.1);
            let real_term = tape.add(smooth_a, smooth_b)?;
            let fake_term = tape.softplus(d_fake);
            let real_mean = tape.mean(real_term);
            let fake_mean = tape.mean(fake_term);
            let loss = tape.add(real_mean, fake_mean)?;
            let mut bindings = param_bindings(&generator, &gen_params);
            bindings.extend(param_bindings(&discriminator, &disc_params));
            tape.forward(&bindings)?;
            tape.backward(loss, None)?;
            let grads: Vec<Tensor> = disc_params
                .vars
                .iter()
                .zip(discriminator.params())
                .map(|(&v, p)| {
                    tape.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(p.rows(), p.cols()))
                })
                .collect();
            let grad_refs: Vec<&Tensor> = grads.iter().collect();
            let mut params = discriminator.params_mut();
            adam_d.step(&mut params, &grad_refs)?;
            tape.value(loss)?.item()?
        };

        // --- generator step (non-saturating) ---
        let mut latent = Tensor::zeros(batch, config.latent_dim);
        for v in latent.data_mut() {
            *v = standard_normal(&mut rng);
        }
        let g_loss = {
            let mut tape = Tape::new();
            let z_var = tape.constant(latent);
            let gen_params = declare_params(&mut tape, &generator);
            let disc_params = declare_params(&mut tape, &discriminator);
            let raw =
                build_forward(&mut tape, &generator, &gen_params, &GraphContext::None, z_var)?;
            let fake = build_decoded_generator(&mut tape, raw, &schema)?;
            let d_fake =
                build_forward(&mut tape, &discriminator, &disc_params, &GraphContext::None, fake)?;
            let neg = tape.scale(d_fake, -1.0);
            let term = tape.softplus(neg);
            let loss = tape.mean(term);
            let mut bindings = param_bindings(&generator, &gen_params);
            bindings.extend(param_bindings(&discriminator, &disc_params));
            tape.forward(&bindings)?;
            tape.backward(loss, None)?;
            let grads: Vec<Tensor> = gen_params
                .vars
                .iter()
                .zip(generator.params())
                .map(|(&v, p)| {
                    tape.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(p.rows(), p.cols()))
                })
                .collect();
            let grad_refs: Vec<&Tensor> = grads.iter().collect();
            let mut params = generator.params_mut();
            adam_g.step(&mut params, &grad_refs)?;
            tape.value(loss)?.item()?
        };
        curve.push((d_loss, g_loss));
    }

    Ok((
        TabularModel::Adversarial {
            schema,
            generator,
            discriminator,
            latent_dim: config.latent_dim,
            continuous_ranges,
        },
        curve,
    ))
}

/// Draw `n` i.i.d. rows from a fitted model. Marginal mode draws each
/// column independently; empirical mode resamples source rows; adversarial
/// mode decodes generator outputs (sampling categorical levels from each
/// softmax block).
pub fn sample_population(model: &TabularModel, n: usize, seed: u64) -> Result<NodeTable> {
    if n == 0 {
        return Err(Error::ValueError("population size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model {
        TabularModel::Marginal { schema, columns } => {
            let mut out_columns = Vec::with_capacity(columns.len());
            for (spec, marginal) in schema.columns.iter().zip(columns) {
                match marginal {
                    MarginalColumn::Categorical { pmf } => {
                        let cdf = cumsum(pmf);
                        let values: Vec<u32> =
                            (0..n).map(|_| draw_from_cdf(&cdf, &mut rng) as u32).collect();
                        out_columns.push(Column::Categorical(values));
                    }
                    MarginalColumn::Continuous { lo, hi, pmf } => {
                        let cdf = cumsum(pmf);
                        let width = (hi - lo) / CONTINUOUS_BINS as f64;
                        let (smin, smax) = match &spec.kind {
                            ColumnKind::Continuous { min, max } => (*min, *max),
                            _ => unreachable!(),
                        };
                        let values: Vec<f64> = (0..n)
                            .map(|_| {
                                let bin = draw_from_cdf(&cdf, &mut rng);
                                let jitter: f64 = rng.random();
                                (lo + (bin as f64 + jitter) * width).clamp(smin, smax)
                            })
                            .collect();
                        out_columns.push(Column::Continuous(values));
                    }
                }
            }
            NodeTable::new(n, schema.clone(), out_columns)
        }
        TabularModel::Empirical { table } => {
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..table.len())).collect();
            table.select_rows(&rows)
        }
        TabularModel::Adversarial { schema, generator, latent_dim, continuous_ranges, .. } => {
            let mut latent = Tensor::zeros(n, *latent_dim);
            for v in latent.data_mut() {
                *v = standard_normal(&mut rng);
            }
            let mut tape = Tape::new();
            let z_var = tape.constant(latent);
            let params = declare_params(&mut tape, generator);
            let raw = build_forward(&mut tape, generator, &params, &GraphContext::None, z_var)?;
            let decoded = build_decoded_generator(&mut tape, raw, schema)?;
            tape.forward(&param_bindings(generator, &params))?;
            let rows = tape.value(decoded)?.clone();

            let (_, blocks) = block_layout(schema);
            let mut out_columns = Vec::new();
            let mut cont_idx = 0usize;
            for (spec, &(offset, width)) in schema.columns.iter().zip(&blocks) {
                match &spec.kind {
                    ColumnKind::Categorical { .. } => {
                        let values: Vec<u32> = (0..n)
                            .map(|r| {
                                let probs = &rows.row(r)[offset..offset + width];
                                let cdf = cumsum(probs);
                                draw_from_cdf(&cdf, &mut rng) as u32
                            })
                            .collect();
                        out_columns.push(Column::Categorical(values));
                    }
                    ColumnKind::Continuous { min, max } => {
                        let (lo, hi) = continuous_ranges[cont_idx];
                        cont_idx += 1;
                        let values: Vec<f64> = (0..n)
                            .map(|r| {
                                let unit = rows.get(r, offset);
                                (lo + unit * (hi - lo)).clamp(*min, *max)
                            })
                            .collect();
                        out_columns.push(Column::Continuous(values));
                    }
                }
            }
            NodeTable::new(n, schema.clone(), out_columns)
        }
    }
}

fn cumsum(pmf: &[f64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in pmf {
        acc += p;
        cdf.push(acc);
    }
    cdf
}

fn draw_from_cdf(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cdf.last().expect("nonempty cdf");
    let u: f64 = rng.random_range(0.0..total.max(f64::MIN_POSITIVE));
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Per-column comparison between a real and a synthetic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnComparison {
    pub name: String,
    /// Total-variation distance between the two per-column distributions
    /// (continuous columns are binned over the combined range).
    pub tv_distance: f64,
    /// Aligned histogram rows `(bin label, real mass, synthetic mass)`.
    pub histogram: Vec<(String, f64, f64)>,
}

/// Per-column total-variation distances and aligned histograms. Schemas
/// must match exactly.
pub fn compare_marginals(real: &NodeTable, synth: &NodeTable) -> Result<Vec<ColumnComparison>> {
    if real.schema() != synth.schema() {
        return Err(Error::SchemaError("tables have different schemas".into()));
    }
    if real.is_empty() || synth.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut out = Vec::new();
    for ((spec, rcol), scol) in
        real.schema().columns.iter().zip(real.columns()).zip(synth.columns())
    {
        let (labels, rp, sp): (Vec<String>, Vec<f64>, Vec<f64>) = match (&spec.kind, rcol, scol) {
            (
                ColumnKind::Categorical { levels },
                Column::Categorical(rv),
                Column::Categorical(sv),
            ) => {
                let mut rp = vec![0.0; levels.len()];
                let mut sp = vec![0.0; levels.len()];
                for &v in rv {
                    rp[v as usize] += 1.0 / rv.len() as f64;
                }
                for &v in sv {
                    sp[v as usize] += 1.0 / sv.len() as f64;
                }
                (levels.clone(), rp, sp)
            }
            (ColumnKind::Continuous { .. }, Column::Continuous(rv), Column::Continuous(sv)) => {
                let (rlo, rhi) = observed_range(rv);
                let (slo, shi) = observed_range(sv);
                let lo = rlo.min(slo);
                let hi = rhi.max(shi);
                let span = (hi - lo).max(f64::MIN_POSITIVE);
                let bin_of = |v: f64| {
                    ((((v - lo) / span) * CONTINUOUS_BINS as f64) as usize)
                        .min(CONTINUOUS_BINS - 1)
                };
                let mut rp = vec![0.0; CONTINUOUS_BINS];
                let mut sp = vec![0.0; CONTINUOUS_BINS];
                for &v in rv {
                    rp[bin_of(v)] += 1.0 / rv.len() as f64;
                }
                for &v in sv {
                    sp[bin_of(v)] += 1.0 / sv.len() as f64;
                }
                let labels = (0..CONTINUOUS_BINS)
                    .map(|b| format!("{:.6}", lo + (b as f64 + 0.5) * span / CONTINUOUS_BINS as f64))
                    .collect();
                (labels, rp, sp)
            }
            _ => unreachable!(),
        };
        let tv = 0.5 * rp.iter().zip(&sp).map(|(a, b)| (a - b).abs()).sum::<f64>();
        let histogram =
            labels.into_iter().zip(rp.iter().zip(&sp)).map(|(l, (&r, &s))| (l, r, s)).collect();
        out.push(ColumnComparison { name: spec.name.clone(), tv_distance: tv, histogram });
    }
    Ok(out)
}
