//! Acceptance suite: thirteen release criteria, one test each, every
//! tolerance pinned in code. Each test prints a `PASS criterion NN` line
//! on success (visible with `--nocapture`).
//!
//! Run with `cargo test -p synthnet-cli --test acceptance`.

// oracle code intentionally written with explicit index loops
#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeMap;

use common::planted_block_graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use synthnet_core::autodiff::{finite_difference_gradients, max_relative_error, Tape, Tensor};
use synthnet_core::generate::{generate_graph, target_edge_count, ChainConfig};
use synthnet_core::gnn::{init_model, Activation, Arch};
use synthnet_core::graph::{
    apply_permutation, build_graph, erdos_renyi_gnm, induced_subgraph, AttributedGraph, Column,
    ColumnKind, ColumnSpec, EdgeList, FeatureSchema, NodeTable, Permutation,
};
use synthnet_core::sample::{sample_negative_edges, split_edges, split_nodes};
use synthnet_core::stats::{
    avg_nearest_neighbor_degree, connected_components, count_triangles, laplacian_spectrum,
    mixing_matrix, MixingMode,
};
use synthnet_core::tabgen::{
    compare_marginals, fit_adversarial, fit_marginal, sample_population, AdversarialConfig,
};
use synthnet_core::tasks::{
    auc_rank, classification_loss, decode_edge_prob, evaluate_classifier,
    evaluate_link_predictor, gae_loss, mixing_cross_entropy, model_mixing_matrix,
    predict_class_proba, regularized_gae_loss, train_classifier, train_gae, ClassifierModel,
    InputEncoding, MixingEstimateConfig, TrainClassifierConfig, TrainGaeConfig,
};

fn chi2_critical(dof: usize, significance: f64) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(1.0 - significance)
}

/// Criterion 1 — ER triangle law: the mean triangle count of G(N = 1e5,
/// M = 1.23e6) over 20 seeds sits within 3 standard errors of
/// (4/3)(M/N)^3 ~ 2481.
#[test]
fn c01_er_triangle_law() {
    let n = 100_000usize;
    let m = 1_230_000usize;
    let expected = 4.0 / 3.0 * (m as f64 / n as f64).powi(3);
    let seeds = 20u64;
    let counts: Vec<f64> =
        (0..seeds).map(|s| count_triangles(&erdos_renyi_gnm(n, m, s).unwrap()) as f64).collect();
    let mean = counts.iter().sum::<f64>() / seeds as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (seeds - 1) as f64;
    let sem = (var / seeds as f64).sqrt();
    let dev = (mean - expected).abs();
    assert!(
        dev <= 3.0 * sem,
        "mean {mean:.1} deviates {dev:.1} from {expected:.1} (3 sem = {:.1})",
        3.0 * sem
    );
    println!(
        "PASS criterion 01: ER triangle law - mean {mean:.1} vs {expected:.1} (3 sem = {:.1})",
        3.0 * sem
    );
}

/// Criterion 2 — target edge count from the reference edge/node ratio.
#[test]
fn c02_target_edge_count() {
    let target = target_edge_count(100_000, 1_575_861, 19_481_626).unwrap();
    let dev = (target as i64 - 1_236_242i64).abs();
    assert!(dev <= 20, "target {target} deviates {dev} from 1,236,242");
    println!("PASS criterion 02: target edge count {target} within 20 of 1,236,242");
}

/// Criterion 3 — an 80/20 node split leaves ~64% of edges train-train.
#[test]
fn c03_node_split_edge_classes() {
    let graph = erdos_renyi_gnm(500, 25_000, 7).unwrap();
    let runs = 50u64;
    let mean = (0..runs)
        .map(|seed| split_nodes(&graph, 0.8, seed).unwrap().edge_class_fractions.0)
        .sum::<f64>()
        / runs as f64;
    assert!((mean - 0.64).abs() <= 0.02, "mean train-train fraction {mean:.4}");
    println!("PASS criterion 03: train-train edge fraction {mean:.4} within 0.64 +- 0.02");
}

struct LabeledGraph {
    graph: AttributedGraph,
}

fn random_feature_graph(n: usize, m: usize, feature_dim: usize, seed: u64) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<ColumnSpec> = (0..feature_dim)
        .map(|f| ColumnSpec {
            name: format!("f{f}"),
            kind: ColumnKind::Continuous { min: -1.0, max: 1.0 },
        })
        .collect();
    let schema = FeatureSchema::new(columns).unwrap();
    let data: Vec<Column> = (0..feature_dim)
        .map(|_| Column::Continuous((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect();
    let table = NodeTable::new(n, schema, data).unwrap();
    let base = erdos_renyi_gnm(n, m, seed ^ 0xabcd).unwrap();
    let graph = build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap();
    LabeledGraph { graph }
}

fn permuted_features(x: &Tensor, perm: &Permutation) -> Tensor {
    let mut out = Tensor::zeros(x.rows(), x.cols());
    for i in 0..x.rows() {
        for c in 0..x.cols() {
            out.set(perm.apply(i), c, x.get(i, c));
        }
    }
    out
}

/// Criterion 4 — equivariance of every architecture and both task
/// pipelines under random relabelings, to 1e-10.
#[test]
fn c04_equivariance_suite() {
    let tolerance = 1e-10;
    let mut checked = 0usize;
    for trial in 0..100u64 {
        let arch = match trial % 3 {
            0 => Arch::Mlp,
            1 => Arch::Gcn,
            _ => Arch::Sage,
        };
        let n = 10 + (trial % 5) as usize;
        let g = erdos_renyi_gnm(n, 2 * n, trial).unwrap();
        let perm = Permutation::random(n, trial + 1000);
        let h = apply_permutation(&g, &perm).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(trial + 2000);
        let x = Tensor::uniform(n, 4, -1.0, 1.0, &mut rng);
        let px = permuted_features(&x, &perm);
        let model =
            init_model(arch, &[4, 6, 3], &[Activation::Tanh, Activation::Identity], trial + 3000)
                .unwrap();
        let graph_for = |gr: &AttributedGraph| match arch {
            Arch::Mlp => None,
            _ => Some(gr.clone()),
        };
        let z = synthnet_core::gnn::forward(&model, graph_for(&g).as_ref(), &x).unwrap();
        let pz = synthnet_core::gnn::forward(&model, graph_for(&h).as_ref(), &px).unwrap();
        for i in 0..n {
            for c in 0..3 {
                let diff = (pz.get(perm.apply(i), c) - z.get(i, c)).abs();
                assert!(diff <= tolerance, "{arch:?} trial {trial}: forward diff {diff}");
            }
        }
        checked += 1;
    }

    // classification pipeline: probabilities permute with the nodes
    for trial in 0..10u64 {
        let n = 12;
        let schema = FeatureSchema::new(vec![
            ColumnSpec { name: "x".into(), kind: ColumnKind::Continuous { min: -1.0, max: 1.0 } },
            ColumnSpec {
                name: "y".into(),
                kind: ColumnKind::Categorical { levels: vec!["u".into(), "v".into()] },
            },
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let labels: Vec<u32> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let table = NodeTable::new(
            n,
            schema,
            vec![Column::Continuous(xs), Column::Categorical(labels.clone())],
        )
        .unwrap();
        let base = erdos_renyi_gnm(n, 20, trial + 10).unwrap();
        let g = build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap();
        let perm = Permutation::random(n, trial + 20);
        let h = apply_permutation(&g, &perm).unwrap();

        let encoding =
            synthnet_core::tasks::fit_encoding(g.nodes(), Some("y"), None).unwrap();
        let encoder = init_model(
            Arch::Sage,
            &[encoding.width(), 5, 2],
            &[Activation::Relu, Activation::Identity],
            trial + 30,
        )
        .unwrap();
        let model = ClassifierModel {
            encoder,
            target: "y".into(),
            encoding: encoding.clone(),
            class_labels: vec!["u".into(), "v".into()],
        };
        let nodes: Vec<usize> = (0..n).collect();
        let p = predict_class_proba(&model, &g, &nodes).unwrap();
        let pp = predict_class_proba(&model, &h, &nodes).unwrap();
        for i in 0..n {
            for c in 0..2 {
                let diff = (pp.get(perm.apply(i), c) - p.get(i, c)).abs();
                assert!(diff <= tolerance, "class probabilities must permute, diff {diff}");
            }
        }
        // scalar metrics are invariant
        let onehot = {
            let mut t = Tensor::zeros(n, 2);
            for (i, &v) in labels.iter().enumerate() {
                t.set(i, v as usize, 1.0);
            }
            t
        };
        let ponehot = {
            let mut t = Tensor::zeros(n, 2);
            for (i, &v) in labels.iter().enumerate() {
                t.set(perm.apply(i), v as usize, 1.0);
            }
            t
        };
        let loss = classification_loss(&p, &onehot, &nodes).unwrap();
        let ploss = classification_loss(&pp, &ponehot, &nodes).unwrap();
        assert!((loss - ploss).abs() <= tolerance, "classification loss invariance");
        checked += 1;
    }

    // link-prediction pipeline: pair scores and the ranking metrics are
    // invariant
    for trial in 0..10u64 {
        let lab = random_feature_graph(12, 26, 3, trial + 500);
        let g = lab.graph;
        let perm = Permutation::random(12, trial + 600);
        let h = apply_permutation(&g, &perm).unwrap();
        let encoding = synthnet_core::tasks::fit_encoding(g.nodes(), None, None).unwrap();
        let encoder = init_model(
            Arch::Gcn,
            &[encoding.width(), 5, 4],
            &[Activation::Tanh, Activation::Identity],
            trial,
        )
        .unwrap();
        let gae = synthnet_core::tasks::GaeModel {
            encoder,
            alpha: 1.2,
            beta: -0.3,
            encoding,
        };
        let z = gae.embeddings(&g).unwrap();
        let pz = gae.embeddings(&h).unwrap();
        let pos: Vec<(usize, usize)> = g.edges()[..8].to_vec();
        let neg = sample_negative_edges(&g, 8, trial, &[]).unwrap();
        let map = |pairs: &[(usize, usize)]| -> Vec<(usize, usize)> {
            pairs.iter().map(|&(u, v)| (perm.apply(u), perm.apply(v))).collect()
        };
        let score = |zt: &Tensor, pairs: &[(usize, usize)]| -> Vec<f64> {
            pairs
                .iter()
                .map(|&(u, v)| decode_edge_prob(zt.row(u), zt.row(v), gae.alpha, gae.beta).unwrap())
                .collect()
        };
        let (sp, sn) = (score(&z, &pos), score(&z, &neg));
        let (tp, tn) = (score(&pz, &map(&pos)), score(&pz, &map(&neg)));
        for (a, b) in sp.iter().zip(&tp).chain(sn.iter().zip(&tn)) {
            assert!((a - b).abs() <= tolerance, "pair scores must be invariant");
        }
        let auc = auc_rank(&sp, &sn);
        let pauc = auc_rank(&tp, &tn);
        assert!((auc - pauc).abs() <= tolerance);
        let loss = gae_loss(&z, &pos, &neg, gae.alpha, gae.beta).unwrap();
        let ploss = gae_loss(&pz, &map(&pos), &map(&neg), gae.alpha, gae.beta).unwrap();
        assert!((loss - ploss).abs() <= tolerance);
        checked += 1;
    }
    println!("PASS criterion 04: equivariance on {checked} random (graph, permutation, model) triples at 1e-10");
}

/// Central finite differences against the tape gradients for a scalar
/// loss over several parameter tensors.
fn fd_check(
    build: impl Fn(&mut Tape, &[synthnet_core::autodiff::Var]) -> synthnet_core::autodiff::Var,
    params: &[Tensor],
    tol: f64,
) {
    let analytic: Vec<Tensor> = {
        let mut tape = Tape::new();
        let vars: Vec<_> = params.iter().map(|p| tape.leaf(p.rows(), p.cols())).collect();
        let loss = build(&mut tape, &vars);
        let bindings: Vec<_> = vars.iter().copied().zip(params).collect();
        tape.forward(&bindings).unwrap();
        tape.backward(loss, None).unwrap();
        vars.iter()
            .zip(params)
            .map(|(&v, p)| {
                tape.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(p.rows(), p.cols()))
            })
            .collect()
    };
    let numeric = finite_difference_gradients(
        &mut |values: &[Tensor]| {
            let mut tape = Tape::new();
            let vars: Vec<_> = values.iter().map(|p| tape.leaf(p.rows(), p.cols())).collect();
            let loss = build(&mut tape, &vars);
            let bindings: Vec<_> = vars.iter().copied().zip(values).collect();
            tape.forward(&bindings)?;
            tape.value(loss)?.item()
        },
        params,
        1e-5,
    )
    .unwrap();
    for (a, n) in analytic.iter().zip(&numeric) {
        let err = max_relative_error(a, n);
        assert!(err < tol, "finite-difference disagreement {err}");
    }
}

/// Criterion 5 — gradient suite: the classification loss, the
/// link-prediction loss, its regularized variant, and each encoder layer
/// pass central finite differences at 1e-5 on 20 random instances each.
#[test]
fn c05_gradient_suite() {
    let tol = 1e-5;
    let instances = 20u64;

    // classification cross-entropy from logits
    for seed in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let logits = Tensor::uniform(5, 3, -2.0, 2.0, &mut rng);
        let mut onehot = Tensor::zeros(5, 3);
        for i in 0..5 {
            onehot.set(i, rng.random_range(0..3), 1.0);
        }
        fd_check(
            |tape, vars| {
                let log_p = tape.log_softmax_rows(vars[0]);
                let y = tape.constant(onehot.clone());
                let picked = tape.mul(log_p, y).unwrap();
                let total = tape.sum(picked);
                tape.scale(total, -1.0)
            },
            &[logits],
            tol,
        );
    }

    // link-prediction loss over embeddings and the decoder scalars
    let pair_loss = |tape: &mut Tape,
                     vars: &[synthnet_core::autodiff::Var],
                     pos: &[(usize, usize)],
                     neg: &[(usize, usize)]| {
        let gather = |tape: &mut Tape, pairs: &[(usize, usize)]| {
            let zi = tape.row_gather(vars[0], pairs.iter().map(|p| p.0).collect()).unwrap();
            let zj = tape.row_gather(vars[0], pairs.iter().map(|p| p.1).collect()).unwrap();
            let prod = tape.mul(zi, zj).unwrap();
            let dots = tape.row_sum(prod);
            let scaled = tape.mul_scalar_var(dots, vars[1]).unwrap();
            tape.add_scalar_var(scaled, vars[2]).unwrap()
        };
        let pos_logits = gather(tape, pos);
        let neg_logits = gather(tape, neg);
        let neg_pos = tape.scale(pos_logits, -1.0);
        let a = tape.softplus(neg_pos);
        let b = tape.softplus(neg_logits);
        let sa = tape.sum(a);
        let sb = tape.sum(b);
        let total = tape.add(sa, sb).unwrap();
        tape.scale(total, 1.0 / (pos.len() + neg.len()) as f64)
    };
    for seed in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let z = Tensor::uniform(6, 4, -1.0, 1.0, &mut rng);
        let alpha = Tensor::scalar(rng.random_range(0.5..1.5));
        let beta = Tensor::scalar(rng.random_range(-0.5..0.5));
        let pos = [(0, 1), (2, 3), (1, 4)];
        let neg = [(0, 5), (2, 4), (3, 5)];
        fd_check(
            |tape, vars| pair_loss(tape, vars, &pos, &neg),
            &[z.clone(), alpha.clone(), beta.clone()],
            tol,
        );

        // the regularized variant adds the mixing cross-entropy term
        let labels: Vec<u32> = (0..6).map(|i| (i % 2) as u32).collect();
        let target = [vec![0.3, 0.5], vec![0.0, 0.2]];
        let lambda = 1.7;
        let all_pairs: Vec<(usize, usize)> =
            (0..6).flat_map(|i| ((i + 1)..6).map(move |j| (i, j))).collect();
        fd_check(
            |tape, vars| {
                let bce = pair_loss(tape, vars, &pos, &neg);
                let zi =
                    tape.row_gather(vars[0], all_pairs.iter().map(|p| p.0).collect()).unwrap();
                let zj =
                    tape.row_gather(vars[0], all_pairs.iter().map(|p| p.1).collect()).unwrap();
                let prod = tape.mul(zi, zj).unwrap();
                let dots = tape.row_sum(prod);
                let scaled = tape.mul_scalar_var(dots, vars[1]).unwrap();
                let logits = tape.add_scalar_var(scaled, vars[2]).unwrap();
                let probs = tape.sigmoid(logits);
                let total = tape.sum(probs);
                let mut reg: Option<synthnet_core::autodiff::Var> = None;
                for a in 0..2usize {
                    for b in a..2usize {
                        if target[a][b] <= 0.0 {
                            continue;
                        }
                        let mask: Vec<f64> = all_pairs
                            .iter()
                            .map(|&(i, j)| {
                                let (x, y) = (labels[i] as usize, labels[j] as usize);
                                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                                f64::from((x, y) == (a, b))
                            })
                            .collect();
                        let mask_c =
                            tape.constant(Tensor::new(all_pairs.len(), 1, mask).unwrap());
                        let cell_mass = tape.mul(probs, mask_c).unwrap();
                        let cell_sum = tape.sum(cell_mass);
                        let cell = tape.div(cell_sum, total).unwrap();
                        let log_cell = tape.log_floor(cell, 1e-12);
                        let w = tape.scale(log_cell, -target[a][b]);
                        reg = Some(match reg {
                            Some(acc) => tape.add(acc, w).unwrap(),
                            None => w,
                        });
                    }
                }
                let reg = tape.scale(reg.unwrap(), lambda);
                tape.add(bce, reg).unwrap()
            },
            &[z, alpha, beta],
            tol,
        );
    }

    // every encoder layer, parameters and inputs together
    for seed in 0..instances {
        let g = erdos_renyi_gnm(6, 9, seed).unwrap();
        for arch in [Arch::Mlp, Arch::Gcn, Arch::Sage] {
            let model =
                init_model(arch, &[3, 4], &[Activation::Sigmoid], seed + 7).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 9);
            let x = Tensor::uniform(6, 3, -1.0, 1.0, &mut rng);
            let graph = match arch {
                Arch::Mlp => None,
                _ => Some(&g),
            };
            let mut params: Vec<Tensor> = model.params().into_iter().cloned().collect();
            params.push(x);
            let n_params = params.len();
            let context = synthnet_core::gnn::GraphContext::for_model(&model, graph).unwrap();
            fd_check(
                |tape, vars| {
                    let model_vars = synthnet_core::gnn::ModelVars {
                        vars: vars[..n_params - 1].to_vec(),
                    };
                    let out = synthnet_core::gnn::build_forward(
                        tape,
                        &model,
                        &model_vars,
                        &context,
                        vars[n_params - 1],
                    )
                    .unwrap();
                    tape.sum(out)
                },
                &params,
                tol,
            );
        }
    }
    println!("PASS criterion 05: gradient suite - losses and layers match central differences at 1e-5");
}

/// Experiment A: the label is a threshold of the node's own features.
fn experiment_a_graph(n: usize, seed: u64) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = 4usize;
    let mut columns: Vec<ColumnSpec> = (0..dims)
        .map(|f| ColumnSpec {
            name: format!("f{f}"),
            kind: ColumnKind::Continuous { min: 0.0, max: 1.0 },
        })
        .collect();
    columns.push(ColumnSpec {
        name: "label".into(),
        kind: ColumnKind::Categorical { levels: vec!["no".into(), "yes".into()] },
    });
    let schema = FeatureSchema::new(columns).unwrap();
    let features: Vec<Vec<f64>> =
        (0..dims).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
    let labels: Vec<u32> =
        (0..n).map(|i| u32::from(features[0][i] + features[1][i] > 1.0)).collect();
    let mut data: Vec<Column> = features.into_iter().map(Column::Continuous).collect();
    data.push(Column::Categorical(labels));
    let table = NodeTable::new(n, schema, data).unwrap();
    let base = erdos_renyi_gnm(n, 4 * n, seed ^ 0x1111).unwrap();
    build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap()
}

/// Experiment B: the label is the majority of the neighbors' binary flag.
fn experiment_b_graph(n: usize, seed: u64) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flags: Vec<u32> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let base = erdos_renyi_gnm(n, 4 * n, seed ^ 0x2222).unwrap();
    let labels: Vec<u32> = (0..n)
        .map(|v| {
            let nb = base.neighbors(v);
            if nb.is_empty() {
                return flags[v];
            }
            let ones: usize = nb.iter().filter(|&&u| flags[u] == 1).count();
            match (2 * ones).cmp(&nb.len()) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => flags[v],
            }
        })
        .collect();
    let schema = FeatureSchema::new(vec![
        ColumnSpec {
            name: "flag".into(),
            kind: ColumnKind::Categorical { levels: vec!["f0".into(), "f1".into()] },
        },
        ColumnSpec {
            name: "label".into(),
            kind: ColumnKind::Categorical { levels: vec!["no".into(), "yes".into()] },
        },
    ])
    .unwrap();
    let table = NodeTable::new(
        n,
        schema,
        vec![Column::Categorical(flags), Column::Categorical(labels)],
    )
    .unwrap();
    build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap()
}

fn train_and_test(
    graph: &AttributedGraph,
    arch: Arch,
    seed: u64,
    epochs: usize,
    train_frac: f64,
) -> f64 {
    let config = TrainClassifierConfig {
        arch,
        hidden_dims: vec![16],
        epochs,
        learning_rate: 0.02,
        train_frac,
        split_seed: seed,
        walk_roots: 512,
        walk_length: 3,
        batch_size: 256,
        seed,
    };
    let (model, _) = train_classifier(graph, "label", &config).unwrap();
    let split = split_nodes(graph, train_frac, seed).unwrap();
    let test_graph = induced_subgraph(graph, &split.test_nodes).unwrap();
    let nodes: Vec<usize> = (0..test_graph.n()).collect();
    evaluate_classifier(&model, &test_graph, &nodes).unwrap().accuracy.unwrap()
}

/// Criterion 6 — planted node classification: when the label depends only
/// on a node's own features the MLP and SAGE tie (within 3 points, MLP at
/// 95%+); when it depends on the neighbors, SAGE wins by 10+ points.
///
/// Experiment A uses an 80/20 node split. Experiment B uses a 50/50 split
/// so the test-induced neighborhoods keep enough of each node's true
/// neighborhood for its majority to remain readable at all (the
/// information ceiling of the majority rule itself is ~0.64 under 80/20
/// discard-based evaluation, ~0.75 under 50/50).
#[test]
fn c06_planted_classification() {
    let n = 2000usize;
    let seeds = 5u64;

    let mut mlp_a = 0.0;
    let mut sage_a = 0.0;
    let mut mlp_b = 0.0;
    let mut sage_b = 0.0;
    for seed in 0..seeds {
        let ga = experiment_a_graph(n, seed);
        mlp_a += train_and_test(&ga, Arch::Mlp, seed, 2000, 0.8);
        sage_a += train_and_test(&ga, Arch::Sage, seed, 2000, 0.8);
        let gb = experiment_b_graph(n, seed);
        mlp_b += train_and_test(&gb, Arch::Mlp, seed, 400, 0.5);
        sage_b += train_and_test(&gb, Arch::Sage, seed, 400, 0.5);
    }
    mlp_a /= seeds as f64;
    sage_a /= seeds as f64;
    mlp_b /= seeds as f64;
    sage_b /= seeds as f64;

    assert!(mlp_a >= 0.95, "experiment A: MLP accuracy {mlp_a:.3}");
    assert!(
        (mlp_a - sage_a).abs() <= 0.03,
        "experiment A: |MLP - SAGE| = {:.3}",
        (mlp_a - sage_a).abs()
    );
    assert!(
        sage_b - mlp_b >= 0.10,
        "experiment B: SAGE {sage_b:.3} should beat MLP {mlp_b:.3} by 10+ points"
    );
    println!(
        "PASS criterion 06: planted classification - A: MLP {mlp_a:.3} vs SAGE {sage_a:.3}; B: SAGE {sage_b:.3} vs MLP {mlp_b:.3}"
    );
}

/// Criterion 7 — link prediction reaches AUC >= 0.95 on planted
/// homophilous graphs, and the AUC statistic itself equals the O(n^2)
/// pairwise oracle exactly.
#[test]
fn c07_link_prediction() {
    // AUC vs the quadratic oracle, including ties
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let pos: Vec<f64> = (0..60).map(|_| (rng.random::<f64>() * 6.0).round() / 6.0).collect();
        let neg: Vec<f64> = (0..80).map(|_| (rng.random::<f64>() * 6.0).round() / 6.0).collect();
        let mut wins = 0.0;
        for &a in &pos {
            for &b in &neg {
                wins += if a > b {
                    1.0
                } else if a == b {
                    0.5
                } else {
                    0.0
                };
            }
        }
        let oracle = wins / (pos.len() * neg.len()) as f64;
        assert!((auc_rank(&pos, &neg) - oracle).abs() < 1e-12, "AUC rank statistic vs oracle");
    }

    // trained model on homophilous blocks
    let graph = planted_block_graph(12, 10, 0.9, 0.005, 3);
    let config = TrainGaeConfig {
        arch: Arch::Sage,
        hidden_dims: vec![32],
        output_dim: 16,
        epochs: 120,
        learning_rate: 0.03,
        walk_roots: 96,
        walk_length: 3,
        seed: 4,
        ..TrainGaeConfig::default()
    };
    let (model, _) = train_gae(&graph, &config).unwrap();
    let split = split_edges(&graph, 0.5, config.seed).unwrap();
    let train_graph =
        build_graph(graph.nodes().clone(), EdgeList::from_pairs(split.train_edges)).unwrap();
    let negatives = sample_negative_edges(&graph, split.test_edges.len(), 11, &[]).unwrap();
    let report =
        evaluate_link_predictor(&model, &train_graph, &split.test_edges, &negatives).unwrap();
    let auc = report.auc.unwrap();
    assert!(auc >= 0.95, "held-out AUC {auc:.4}");
    println!("PASS criterion 07: link prediction - held-out AUC {auc:.4} >= 0.95, rank statistic matches the quadratic oracle");
}

/// Criterion 8 — rewiring-chain correctness: with a constant decoder on 3
/// nodes and a 1-edge target, the three single-edge states are occupied
/// uniformly (chi-square at 1%), and the edge count never leaves
/// [M - n, M + n].
#[test]
fn c08_chain_correctness() {
    let schema = FeatureSchema::new(vec![ColumnSpec {
        name: "x".into(),
        kind: ColumnKind::Continuous { min: 0.0, max: 1.0 },
    }])
    .unwrap();
    let table =
        NodeTable::new(3, schema, vec![Column::Continuous(vec![0.1, 0.5, 0.9])]).unwrap();
    // a zero encoder with beta = logit(1/2) decodes every pair to 1/2
    let encoding: InputEncoding =
        synthnet_core::tasks::fit_encoding(&table, None, None).unwrap();
    let mut encoder =
        init_model(Arch::Mlp, &[encoding.width(), 2], &[Activation::Identity], 0).unwrap();
    for p in encoder.params_mut() {
        for v in p.data_mut() {
            *v = 0.0;
        }
    }
    let gae = synthnet_core::tasks::GaeModel { encoder, alpha: 1.0, beta: 0.0, encoding };
    let iterations = 100_000usize;
    let config = ChainConfig {
        iterations,
        batch_size: 1,
        target_edges: 1,
        refresh_every: 1,
        record_states: true,
        seed: 20_260_810,
    };
    let (_, history) = generate_graph(&table, &gae, &config).unwrap();
    let states = history.states.as_ref().expect("state recording on");
    assert_eq!(states.len(), iterations);

    let mut occupancy: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    for (record, state) in history.records.iter().zip(states) {
        assert!(record.edges_after <= 2, "edge count within [M - n, M + n] = [0, 2]");
        if state.len() == 1 {
            *occupancy.entry(state.clone()).or_default() += 1;
        }
    }
    assert_eq!(occupancy.len(), 3, "all three single-edge states visited");
    let total: usize = occupancy.values().sum();
    let expected = total as f64 / 3.0;
    let mut chi2 = 0.0;
    for &count in occupancy.values() {
        chi2 += (count as f64 - expected).powi(2) / expected;
    }
    let critical = chi2_critical(2, 0.01);
    assert!(chi2 < critical, "chi2 {chi2:.2} over 2 dof exceeds {critical:.2}");

    // exact-chain oracle: the stationary distribution of the 4-state chain
    // puts equal mass on the three single-edge states
    let p = 0.5f64;
    // states: 0 = empty, 1..=3 single-edge
    let mut pi = [0.25f64; 4];
    for _ in 0..10_000 {
        let mut next = [0.0f64; 4];
        // from empty: add one of the 3 pairs with probability p
        next[0] += pi[0] * (1.0 - p);
        for e in 1..4 {
            next[e] += pi[0] * p / 3.0;
            // from a single-edge state: delete with probability 1 - p
            next[0] += pi[e] * (1.0 - p);
            next[e] += pi[e] * p;
        }
        pi = next;
    }
    let conditional = pi[1] / (pi[1] + pi[2] + pi[3]);
    assert!((conditional - 1.0 / 3.0).abs() < 1e-12, "exact oracle is uniform");
    println!(
        "PASS criterion 08: chain correctness - chi2 {chi2:.2} < {critical:.2}, edges stayed in [0, 2]"
    );
}

/// Criterion 9 — fusion regularizer: zero lambda is bit-identical to the
/// plain loss; the model mixing matrix matches a brute-force double loop
/// at 1e-10; and training with a large lambda pulls the model mixing
/// strictly closer (in cross-entropy) to a uniform target than the
/// unregularized run on a planted two-block population.
#[test]
fn c09_fusion_regularizer() {
    // bit-identity at lambda = 0
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let z = Tensor::uniform(30, 5, -1.0, 1.0, &mut rng);
    let labels: Vec<u32> = (0..30).map(|i| (i % 3) as u32).collect();
    let pos = vec![(0, 1), (2, 3), (4, 5), (6, 7)];
    let neg = vec![(8, 9), (10, 11), (12, 13), (14, 15)];
    let target = vec![vec![0.2, 0.2, 0.1], vec![0.0, 0.2, 0.1], vec![0.0, 0.0, 0.2]];
    let plain = gae_loss(&z, &pos, &neg, 0.9, 0.1).unwrap();
    let reg0 = regularized_gae_loss(
        &z,
        &pos,
        &neg,
        0.9,
        0.1,
        &target,
        0.0,
        &labels,
        &MixingEstimateConfig::default(),
    )
    .unwrap();
    assert_eq!(plain.to_bits(), reg0.to_bits(), "lambda = 0 must be bit-identical");

    // brute-force double loop at N = 50
    let z = Tensor::uniform(50, 4, -1.5, 1.5, &mut rng);
    let labels: Vec<u32> = (0..50).map(|_| rng.random_range(0..3u32)).collect();
    let (alpha, beta) = (0.8, -0.2);
    let got = model_mixing_matrix(&z, alpha, beta, &labels, 3, &MixingEstimateConfig::default())
        .unwrap();
    let mut cells = vec![vec![0.0f64; 3]; 3];
    let mut total = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            if i == j {
                continue;
            }
            let p = decode_edge_prob(z.row(i), z.row(j), alpha, beta).unwrap();
            cells[labels[i] as usize][labels[j] as usize] += 0.5 * p;
            total += 0.5 * p;
        }
    }
    let mut upper_total = 0.0;
    for a in 0..3 {
        for b in a..3 {
            let fold =
                if a == b { cells[a][a] } else { cells[a][b] + cells[b][a] } / total;
            assert!((got[a][b] - fold).abs() <= 1e-10, "cell ({a},{b})");
            upper_total += got[a][b];
        }
    }
    assert!((upper_total - 1.0).abs() <= 1e-10);

    // paired runs on a homophilous two-block population
    let graph = planted_block_graph(2, 40, 0.25, 0.01, 9);
    let uniform_target = vec![vec![1.0 / 3.0, 1.0 / 3.0], vec![0.0, 1.0 / 3.0]];
    let base_config = TrainGaeConfig {
        arch: Arch::Sage,
        hidden_dims: vec![16],
        output_dim: 8,
        epochs: 80,
        learning_rate: 0.03,
        walk_roots: 64,
        walk_length: 3,
        seed: 17,
        mixing_attribute: Some("block".into()),
        target_mixing: Some(uniform_target.clone()),
        ..TrainGaeConfig::default()
    };
    let free_config = TrainGaeConfig { lambda: 0.0, ..base_config.clone() };
    let tied_config = TrainGaeConfig { lambda: 20.0, ..base_config };
    let (free_model, _) = train_gae(&graph, &free_config).unwrap();
    let (tied_model, _) = train_gae(&graph, &tied_config).unwrap();
    let labels = graph.nodes().categorical("block").unwrap();
    let mixing_of = |model: &synthnet_core::tasks::GaeModel| {
        let split = split_edges(&graph, 0.5, 17).unwrap();
        let train_graph =
            build_graph(graph.nodes().clone(), EdgeList::from_pairs(split.train_edges)).unwrap();
        let z = model.embeddings(&train_graph).unwrap();
        model_mixing_matrix(
            &z,
            model.alpha,
            model.beta,
            labels,
            2,
            &MixingEstimateConfig::default(),
        )
        .unwrap()
    };
    let free_ce = mixing_cross_entropy(&uniform_target, &mixing_of(&free_model));
    let tied_ce = mixing_cross_entropy(&uniform_target, &mixing_of(&tied_model));
    assert!(
        tied_ce < free_ce,
        "large lambda must close the gap: {tied_ce:.4} vs {free_ce:.4}"
    );
    println!(
        "PASS criterion 09: fusion regularizer - bit-identity, double-loop match at 1e-10, CE {tied_ce:.4} < {free_ce:.4}"
    );
}

/// Criterion 10 — ERGM exactness: logit-density recovery, MCMC against
/// enumerated Boltzmann weights, exhaustive change statistics, and the
/// moment condition on enumerable dyad-independent fits.
#[test]
fn c10_ergm_exactness() {
    use synthnet_core::ergm::{
        change_statistic, mcmc_sample, mple_fit, sufficient_statistics, ErgmSpec, McmcConfig,
        MpleConfig, Proposal, TermKind,
    };

    // (a) edges-only MPLE recovers logit(density) to 1e-6
    let g = erdos_renyi_gnm(24, 69, 2).unwrap();
    let spec = ErgmSpec::new(vec![TermKind::Edges]).unwrap();
    let fit = mple_fit(&g, &spec, &MpleConfig::default()).unwrap();
    let density: f64 = 69.0 / (24.0 * 23.0 / 2.0);
    let expect = (density / (1.0 - density)).ln();
    assert!((fit.theta[0] - expect).abs() < 1e-6, "{} vs {expect}", fit.theta[0]);

    // (b) 5-node, 2-term spec: sampled frequencies match the enumerated
    // Boltzmann weights (chi-square at 1%)
    let schema = FeatureSchema::new(vec![ColumnSpec {
        name: "grp".into(),
        kind: ColumnKind::Categorical { levels: vec!["a".into(), "b".into()] },
    }])
    .unwrap();
    let table =
        NodeTable::new(5, schema, vec![Column::Categorical(vec![0, 1, 0, 1, 0])]).unwrap();
    let spec2 =
        ErgmSpec::new(vec![TermKind::Edges, TermKind::NodeMatch("grp".into())]).unwrap();
    let theta = [-0.3, 0.7];
    // enumerate all 1024 graphs
    let pairs: Vec<(usize, usize)> =
        (0..5).flat_map(|u| ((u + 1)..5).map(move |v| (u, v))).collect();
    let mut weights: BTreeMap<u64, f64> = BTreeMap::new();
    let mut z_sum = 0.0;
    for code in 0u64..1024 {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| code >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let graph = build_graph(table.clone(), EdgeList::from_pairs(edges)).unwrap();
        let stats = sufficient_statistics(&graph, &spec2).unwrap();
        let w = (theta[0] * stats[0] + theta[1] * stats[1]).exp();
        weights.insert(code, w);
        z_sum += w;
    }
    let init = build_graph(table.clone(), EdgeList::from_pairs(vec![(0, 1)])).unwrap();
    let run = mcmc_sample(
        &init,
        &spec2,
        &theta,
        &McmcConfig {
            proposal: Proposal::Toggle,
            steps: 2_050_000,
            burn_in: 50_000,
            thin: 20,
            seed: 77,
        },
    )
    .unwrap();
    let code_of = |g: &AttributedGraph| -> u64 {
        let mut code = 0u64;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if g.has_edge(u, v) {
                code |= 1 << i;
            }
        }
        code
    };
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for sample in &run.samples {
        *counts.entry(code_of(sample)).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for (code, w) in &weights {
        let expected = total as f64 * w / z_sum;
        if expected >= 5.0 {
            let observed = counts.get(code).copied().unwrap_or(0) as f64;
            chi2 += (observed - expected).powi(2) / expected;
            dof += 1;
        }
    }
    let critical = chi2_critical(dof - 1, 0.01);
    assert!(chi2 < critical, "chi2 {chi2:.1} on {dof} cells exceeds {critical:.1}");

    // (c) change statistics equal full-recompute differences, exhaustively
    // over every dyad of random graphs on up to 7 nodes
    let spec3 = ErgmSpec::new(vec![
        TermKind::Edges,
        TermKind::NodeMatch("grp".into()),
        TermKind::Esp(1),
        TermKind::Gwesp(0.6),
    ])
    .unwrap();
    let mut dyads_checked = 0usize;
    for n in 4..=7usize {
        for seed in 0..4u64 {
            let schema = FeatureSchema::new(vec![ColumnSpec {
                name: "grp".into(),
                kind: ColumnKind::Categorical { levels: vec!["a".into(), "b".into()] },
            }])
            .unwrap();
            let labels: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
            let table =
                NodeTable::new(n, schema, vec![Column::Categorical(labels)]).unwrap();
            let base = erdos_renyi_gnm(n, (n * (n - 1) / 2).min(2 * n), seed).unwrap();
            let graph =
                build_graph(table.clone(), EdgeList::from_pairs(base.edges().to_vec())).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    let local = change_statistic(&graph, (i, j), &spec3).unwrap();
                    let mut with_e = graph.edges().to_vec();
                    let mut without_e = with_e.clone();
                    if graph.has_edge(i, j) {
                        without_e.retain(|&e| e != (i, j));
                    } else {
                        with_e.push((i, j));
                    }
                    let gw =
                        build_graph(table.clone(), EdgeList::from_pairs(with_e)).unwrap();
                    let go =
                        build_graph(table.clone(), EdgeList::from_pairs(without_e)).unwrap();
                    let fw = sufficient_statistics(&gw, &spec3).unwrap();
                    let fo = sufficient_statistics(&go, &spec3).unwrap();
                    for t in 0..spec3.len() {
                        assert!(
                            (local[t] - (fw[t] - fo[t])).abs() < 1e-10,
                            "dyad ({i},{j}) term {t}"
                        );
                    }
                    dyads_checked += 1;
                }
            }
        }
    }

    // (d) moment condition on an enumerable dyad-independent fit
    let obs_graph = build_graph(
        table.clone(),
        EdgeList::from_pairs(vec![(0, 1), (0, 2), (1, 3), (2, 4), (3, 4), (1, 2)]),
    )
    .unwrap();
    let fit2 = mple_fit(&obs_graph, &spec2, &MpleConfig::default()).unwrap();
    assert!(fit2.converged && !fit2.degenerate);
    let observed = sufficient_statistics(&obs_graph, &spec2).unwrap();
    let mut mean = vec![0.0f64; 2];
    let mut z2 = 0.0;
    for code in 0u64..1024 {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| code >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let graph = build_graph(table.clone(), EdgeList::from_pairs(edges)).unwrap();
        let stats = sufficient_statistics(&graph, &spec2).unwrap();
        let w = (fit2.theta[0] * stats[0] + fit2.theta[1] * stats[1]).exp();
        z2 += w;
        for (m, s) in mean.iter_mut().zip(&stats) {
            *m += w * s;
        }
    }
    for m in &mut mean {
        *m /= z2;
    }
    for (term, (m, o)) in mean.iter().zip(&observed).enumerate() {
        assert!((m - o).abs() < 1e-3, "moment condition, term {term}: {m} vs {o}");
    }
    println!(
        "PASS criterion 10: ERGM exactness - logit recovery, chi2 {chi2:.1} < {critical:.1}, {dyads_checked} dyads exhaustive, moment gap < 1e-3"
    );
}

/// Criterion 11 — statistics vs independent dense/brute-force oracles on
/// 50 random graphs of up to 50 nodes.
#[test]
fn c11_statistics_oracles() {
    for seed in 0..50u64 {
        let n = 10 + (seed as usize * 7) % 41;
        let max_m = n * (n - 1) / 2;
        let m = (seed as usize * 13) % (max_m / 2) + 1;
        let base = erdos_renyi_gnm(n, m, seed).unwrap();
        let labels: Vec<u32> = (0..n).map(|v| ((v * 31 + seed as usize) % 3) as u32).collect();
        let schema = FeatureSchema::new(vec![ColumnSpec {
            name: "c".into(),
            kind: ColumnKind::Categorical {
                levels: vec!["x".into(), "y".into(), "z".into()],
            },
        }])
        .unwrap();
        let table =
            NodeTable::new(n, schema, vec![Column::Categorical(labels.clone())]).unwrap();
        let g = build_graph(table, EdgeList::from_pairs(base.edges().to_vec())).unwrap();

        // triangles = trace(A^3) / 6
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for &(u, v) in g.edges() {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        let a3 = &a * &a * &a;
        let trace: f64 = (0..n).map(|i| a3[(i, i)]).sum();
        assert_eq!(count_triangles(&g), (trace / 6.0).round() as u64, "triangles seed {seed}");

        // knn vs double loop
        let knn = avg_nearest_neighbor_degree(&g);
        for v in 0..n {
            let k = g.neighbors(v).len();
            if k == 0 {
                continue;
            }
            assert!(knn.contains_key(&k));
        }
        let mut by_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for v in 0..n {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                continue;
            }
            let s: usize = nb.iter().map(|&u| g.neighbors(u).len()).sum();
            by_k.entry(nb.len()).or_default().push(s as f64 / nb.len() as f64);
        }
        for (k, vals) in by_k {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((knn[&k] - mean).abs() < 1e-12, "knn seed {seed} k {k}");
        }

        // mixing matrix vs endpoint tally
        if g.m() > 0 {
            let mixing = mixing_matrix(&g, "c", MixingMode::Joint).unwrap();
            let mut tally = vec![vec![0.0f64; 3]; 3];
            for &(u, v) in g.edges() {
                let (x, y) = (labels[u] as usize, labels[v] as usize);
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                tally[x][y] += 1.0 / g.m() as f64;
            }
            let mut total = 0.0;
            for x in 0..3 {
                for y in x..3 {
                    assert!(
                        (mixing.entries[x][y] - tally[x][y]).abs() < 1e-12,
                        "mixing seed {seed}"
                    );
                    total += mixing.entries[x][y];
                }
            }
            assert!((total - 1.0).abs() < 1e-12);
        }

        // components vs BFS, and Laplacian zero count = component count
        let comps = connected_components(&g);
        let mut seen = vec![false; n];
        let mut bfs_count = 0usize;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            bfs_count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                for &v in g.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        assert_eq!(comps.count(), bfs_count, "components seed {seed}");
        let spectrum = laplacian_spectrum(&g, 0.0).unwrap();
        assert_eq!(spectrum.zero_count, bfs_count, "Laplacian zero count seed {seed}");
    }
    println!("PASS criterion 11: statistics match dense/brute-force oracles on 50 graphs");
}

/// Criterion 12 — tabular marginal fidelity: marginal mode reproduces
/// per-column distributions to TV <= 0.02 at n = 1e5; the adversarial
/// mode stays within TV <= 0.05 per column on the two-column benchmark.
#[test]
fn c12_marginal_fidelity() {
    // a 16-level categorical, a skewed binary, and a continuous column
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let levels16: Vec<String> = (0..16).map(|i| format!("l{i}")).collect();
    let schema = FeatureSchema::new(vec![
        ColumnSpec { name: "many".into(), kind: ColumnKind::Categorical { levels: levels16 } },
        ColumnSpec {
            name: "skew".into(),
            kind: ColumnKind::Categorical { levels: vec!["a".into(), "b".into()] },
        },
        ColumnSpec { name: "v".into(), kind: ColumnKind::Continuous { min: 0.0, max: 10.0 } },
    ])
    .unwrap();
    let n_src = 20_000usize;
    let many: Vec<u32> = (0..n_src).map(|_| rng.random_range(0..16)).collect();
    let skew: Vec<u32> = (0..n_src).map(|_| u32::from(rng.random::<f64>() < 0.3)).collect();
    let v: Vec<f64> = (0..n_src).map(|_| rng.random_range(0.0..10.0)).collect();
    let source = NodeTable::new(
        n_src,
        schema,
        vec![Column::Categorical(many), Column::Categorical(skew), Column::Continuous(v)],
    )
    .unwrap();
    let model = fit_marginal(&source).unwrap();
    let sampled = sample_population(&model, 100_000, 8).unwrap();
    let comparison = compare_marginals(&source, &sampled).unwrap();
    for col in &comparison {
        assert!(col.tv_distance <= 0.02, "column `{}` TV {:.4}", col.name, col.tv_distance);
    }
    let marginal_max =
        comparison.iter().map(|c| c.tv_distance).fold(0.0f64, f64::max);

    // two-column adversarial benchmark: 70/30 first column, second column
    // perfectly correlated with it
    let schema = FeatureSchema::new(vec![
        ColumnSpec {
            name: "c1".into(),
            kind: ColumnKind::Categorical { levels: vec!["x".into(), "y".into()] },
        },
        ColumnSpec {
            name: "c2".into(),
            kind: ColumnKind::Categorical { levels: vec!["p".into(), "q".into()] },
        },
    ])
    .unwrap();
    let n_src = 2000usize;
    let c1: Vec<u32> = (0..n_src).map(|i| u32::from(i % 10 >= 7)).collect();
    let source2 = NodeTable::new(
        n_src,
        schema,
        vec![Column::Categorical(c1.clone()), Column::Categorical(c1)],
    )
    .unwrap();
    let (model, _) = fit_adversarial(
        &source2,
        &AdversarialConfig { steps: 2500, seed: 12, ..AdversarialConfig::default() },
    )
    .unwrap();
    let sampled = sample_population(&model, 50_000, 13).unwrap();
    let comparison = compare_marginals(&source2, &sampled).unwrap();
    let mut adv_max = 0.0f64;
    for col in &comparison {
        assert!(
            col.tv_distance <= 0.05,
            "adversarial column `{}` TV {:.4}",
            col.name,
            col.tv_distance
        );
        adv_max = adv_max.max(col.tv_distance);
    }
    println!(
        "PASS criterion 12: marginal fidelity - marginal max TV {marginal_max:.4} <= 0.02, adversarial max TV {adv_max:.4} <= 0.05"
    );
}

/// Criterion 13 — end-to-end CLI determinism: the same pipeline run twice
/// through the binary produces byte-identical artifacts.
#[test]
fn c13_cli_determinism() {
    use std::process::Command;

    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let graph = planted_block_graph(5, 12, 0.5, 0.02, 21);
    let input_dir = root.join("input");
    synthnet_cli::formats::write_bundle(&input_dir, &graph, None).unwrap();

    let config_template = |out: &str| {
        serde_json::json!({
            "seed": 99,
            "out_dir": root.join(out),
            "graph": {
                "nodes": input_dir.join("nodes.csv"),
                "edges": input_dir.join("edges.csv"),
                "schema": input_dir.join("schema.json"),
            },
            "stats": {"attributes": ["block"]},
            "gen_attrs": {"mode": "marginal", "n": 60},
            "train_linkpred": {
                "epochs": 25,
                "hidden_dims": [16],
                "output_dim": 8,
                "learning_rate": 0.05,
                "walk_roots": 30
            },
            "generate": {"iterations": 20, "batch_size": 30, "target_edges": graph.m()},
            "population": {
                "nodes": root.join(out).join("gen-attrs/nodes.csv"),
                "schema": root.join(out).join("gen-attrs/schema.json"),
            },
            "model": root.join(out).join("train-linkpred/model.json"),
            "ergm": {"terms": ["edges", {"node_match": "block"}],
                      "mcmc": {"steps": 2000, "burn_in": 200, "thin": 60}},
        })
    };

    let binary = env!("CARGO_BIN_EXE_synthnet");
    let pipeline = [
        "ingest",
        "stats",
        "gen-attrs",
        "train-linkpred",
        "generate",
        "compare",
        "ergm-fit",
    ];
    for run in ["run_a", "run_b"] {
        let config_path = root.join(format!("{run}.json"));
        std::fs::write(&config_path, config_template(run).to_string()).unwrap();
        for command in pipeline {
            let mut invocation = Command::new(binary);
            invocation.arg(command).arg("--config").arg(&config_path);
            if command == "compare" {
                // compare the input against the generated graph
                let mut config: serde_json::Value =
                    serde_json::from_str(&std::fs::read_to_string(&config_path).unwrap())
                        .unwrap();
                config["graph_b"] = serde_json::json!({
                    "nodes": root.join(run).join("generate/nodes.csv"),
                    "edges": root.join(run).join("generate/edges.csv"),
                    "schema": root.join(run).join("generate/schema.json"),
                });
                let with_b = root.join(format!("{run}_compare.json"));
                std::fs::write(&with_b, config.to_string()).unwrap();
                invocation = Command::new(binary);
                invocation.arg(command).arg("--config").arg(&with_b);
            }
            let output = invocation.output().expect("binary runs");
            assert!(
                output.status.success(),
                "{command} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
        }
    }

    // every artifact byte-identical between the two runs
    let mut compared = 0usize;
    let mut stack = vec![root.join("run_a")];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let relative = path.strip_prefix(root.join("run_a")).unwrap();
            let twin = root.join("run_b").join(relative);
            let a = std::fs::read(&path).unwrap();
            let b = std::fs::read(&twin).unwrap_or_default();
            assert_eq!(a, b, "artifact {} differs between runs", relative.display());
            compared += 1;
        }
    }
    assert!(compared >= 15, "expected a full artifact tree, compared {compared}");
    println!("PASS criterion 13: CLI determinism - {compared} artifacts byte-identical across runs");
}
