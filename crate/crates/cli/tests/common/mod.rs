//! Shared builders for the integration and acceptance suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synthnet_core::graph::{
    build_graph, AttributedGraph, Column, ColumnKind, ColumnSpec, EdgeList, FeatureSchema,
    NodeTable,
};

/// A planted block (community) graph: `blocks * size` nodes carrying their
/// block id as a categorical feature plus a uniform-noise column; edges
/// appear within blocks with probability `p_in` and across with `p_out`.
pub fn planted_block_graph(
    blocks: usize,
    size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> AttributedGraph {
    let n = blocks * size;
    let levels: Vec<String> = (0..blocks).map(|b| format!("b{b}")).collect();
    let schema = FeatureSchema::new(vec![
        ColumnSpec { name: "block".into(), kind: ColumnKind::Categorical { levels } },
        ColumnSpec { name: "noise".into(), kind: ColumnKind::Continuous { min: 0.0, max: 1.0 } },
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block_of: Vec<u32> = (0..n).map(|v| (v / size) as u32).collect();
    let noise: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let table = NodeTable::new(
        n,
        schema,
        vec![Column::Categorical(block_of.clone()), Column::Continuous(noise)],
    )
    .unwrap();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block_of[u] == block_of[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    build_graph(table, EdgeList::from_pairs(edges)).unwrap()
}
