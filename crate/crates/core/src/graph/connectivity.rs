use num::BigInt;

use super::MetricGraph;
use crate::real::integer_determinant;

/// Number of spanning trees by the matrix-tree theorem. Parallel edges
/// count separately; loops are ignored.
pub fn spanning_tree_count(g: &MetricGraph) -> BigInt {
    let n = g.vertex_count();
    if n <= 1 {
        return BigInt::from(1);
    }
    let mut lap = vec![vec![0i64; n]; n];
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        lap[e.tail][e.tail] += 1;
        lap[e.head][e.head] += 1;
        lap[e.tail][e.head] -= 1;
        lap[e.head][e.tail] -= 1;
    }
    let reduced: Vec<Vec<i64>> = lap[1..].iter().map(|row| row[1..].to_vec()).collect();
    integer_determinant(&reduced)
}

fn connected_without(g: &MetricGraph, removed: &[bool]) -> bool {
    let n = g.vertex_count();
    let Some(start) = (0..n).find(|&v| !removed[v]) else {
        return true;
    };
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        if !removed[e.tail] && !removed[e.head] {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
    }
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..n).all(|v| removed[v] || seen[v])
}

/// `k`-vertex-connectivity: more than `k` vertices, and removing any
/// fewer than `k` vertices leaves the graph connected.
pub fn is_k_connected(g: &MetricGraph, k: usize) -> bool {
    let n = g.vertex_count();
    if n <= k {
        return false;
    }
    let mut removed = vec![false; n];
    subsets_connected(g, k.saturating_sub(1), 0, &mut removed)
}

fn subsets_connected(g: &MetricGraph, budget: usize, from: usize, removed: &mut [bool]) -> bool {
    if !connected_without(g, removed) {
        return false;
    }
    if budget == 0 {
        return true;
    }
    for v in from..g.vertex_count() {
        removed[v] = true;
        let ok = subsets_connected(g, budget - 1, v + 1, removed);
        removed[v] = false;
        if !ok {
            return false;
        }
    }
    true
}
