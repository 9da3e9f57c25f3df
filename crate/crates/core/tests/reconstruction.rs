mod common;

use common::{chain_product, cotree_length_sum, small_graphs, table_chain};
use proptest::prelude::*;
use qgraph::frequency::FrequencyTable;
use qgraph::homology::LengthTable;
use qgraph::io::fixtures;
use qgraph::reconstruct::{albanese_gram, complexity, cycle_generator_sets, prepare_table, tree_from_leaves};
use qgraph::{MetricGraph, Real};

/// Every generator set found from the oracle table gives the chain Gram
/// matrix, and all share the cotree determinant.
fn check_gram(g: &MetricGraph) {
    let lengths = LengthTable::new(g.clone());
    let start = FrequencyTable::oracle_for(g, &g.total_length()).unwrap();
    let (table, cap) = prepare_table(&start).unwrap();
    let sets = cycle_generator_sets(&table, &cap, 25).unwrap();
    assert!(!sets.is_empty(), "no generator set for {}", qgraph::io::serialize_graph(g));
    let det = cotree_length_sum(g);
    for set in &sets {
        let gram = albanese_gram(&table, set).unwrap();
        let chains: Vec<Vec<i64>> = set.iter().map(|c| table_chain(&table, &lengths, c)).collect();
        for i in 0..set.len() {
            for j in 0..set.len() {
                assert_eq!(gram.matrix[i][j], chain_product(g, &chains[i], &chains[j]), "{set:?} entry {i},{j}");
            }
        }
        assert_eq!(complexity(&gram).determinant, det);
    }
}

#[test]
fn gram_on_named_graphs() {
    for g in [
        fixtures::theta(&[1, 2, 3]),
        fixtures::figure_eight(2, 3),
        fixtures::k4_unit(),
        fixtures::with_random_rational_lengths(&fixtures::k4_unit(), 5),
        fixtures::prism_unit(),
        fixtures::two_block_chain(),
    ] {
        check_gram(&g);
    }
}

#[test]
fn gram_on_random_small_graphs() {
    for g in small_graphs(30, 6, 3, 23) {
        check_gram(&g);
    }
}

/// Random tree with `leaves` leaves and internal degree at least three,
/// as an edge list over nodes `0..` with leaves first.
fn random_tree(leaves: usize, lengths: &[i64], shape: &[usize]) -> (usize, Vec<(usize, usize, i64)>) {
    // grow by splitting edges or attaching to internal nodes
    if leaves == 2 {
        return (2, vec![(0, 1, lengths[0])]);
    }
    let mut edges: Vec<(usize, usize, i64)> = (0..3).map(|i| (i, 3, lengths[i])).collect();
    let mut node_count = 4;
    let mut leaf_ids = vec![0, 1, 2];
    let mut next_len = 3;
    let take = |i: &mut usize| {
        let l = lengths[*i % lengths.len()];
        *i += 1;
        l
    };
    for k in 3..leaves {
        let pick = shape[k % shape.len()] % edges.len();
        let (a, b, l) = edges[pick];
        let leaf = node_count;
        node_count += 1;
        leaf_ids.push(leaf);
        if l >= 2 && shape[(k + 1) % shape.len()].is_multiple_of(2) {
            // split the edge at an interior point
            let mid = node_count;
            node_count += 1;
            let cut = 1 + (shape[k % shape.len()] as i64 % (l - 1));
            edges[pick] = (a, mid, cut);
            edges.push((mid, b, l - cut));
            edges.push((leaf, mid, take(&mut next_len)));
        } else {
            // attach to the non-leaf end
            let hub = if leaf_ids.contains(&a) { b } else { a };
            edges.push((leaf, hub, take(&mut next_len)));
        }
    }
    // relabel so leaves are 0..leaves
    let mut label = vec![usize::MAX; node_count];
    for (i, &l) in leaf_ids.iter().enumerate() {
        label[l] = i;
    }
    let mut next = leaves;
    for v in 0..node_count {
        if label[v] == usize::MAX {
            label[v] = next;
            next += 1;
        }
    }
    (node_count, edges.into_iter().map(|(a, b, l)| (label[a], label[b], l)).collect())
}

fn leaf_distances(nodes: usize, edges: &[(usize, usize, i64)], leaves: usize) -> Vec<Vec<i64>> {
    let mut adj = vec![Vec::new(); nodes];
    for &(a, b, l) in edges {
        adj[a].push((b, l));
        adj[b].push((a, l));
    }
    (0..leaves)
        .map(|s| {
            let mut d = vec![-1i64; nodes];
            d[s] = 0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, l) in &adj[u] {
                    if d[v] < 0 {
                        d[v] = d[u] + l;
                        stack.push(v);
                    }
                }
            }
            d[..leaves].to_vec()
        })
        .collect()
}

proptest! {
    #![proptest_config(common::proptest_config(64))]

    #[test]
    fn leaf_tree_reconstruction(
        leaves in 2usize..9,
        lengths in proptest::collection::vec(1i64..10, 12),
        shape in proptest::collection::vec(0usize..1000, 12),
    ) {
        let (nodes, edges) = random_tree(leaves, &lengths, &shape);
        let d = leaf_distances(nodes, &edges, leaves);
        let real: Vec<Vec<Real>> = d.iter().map(|r| r.iter().map(|&x| Real::int(x)).collect()).collect();
        let tree = tree_from_leaves(&real).unwrap();
        let total: i64 = edges.iter().map(|e| e.2).sum();
        let got_total = tree.edges.iter().fold(Real::zero(), |acc, e| &acc + &e.2);
        prop_assert_eq!(got_total, Real::int(total));
        prop_assert_eq!(tree.node_count, nodes);
        for (i, &leaf) in tree.leaves.iter().enumerate() {
            let from = tree.distances_from(leaf);
            for (j, &other) in tree.leaves.iter().enumerate() {
                prop_assert_eq!(from[other].clone(), real[i][j].clone());
            }
        }
    }
}
