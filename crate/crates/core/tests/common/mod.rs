#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use qgraph::{MetricGraph, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shortest closed walk for every edge chain reachable within `bound`, by
/// exhaustive layered search over (vertex, chain) states from every base
/// vertex. Lengths must be positive integers.
pub fn closed_walk_minima(g: &MetricGraph, bound: i64) -> HashMap<Vec<i64>, i64> {
    let lengths: Vec<i64> = g
        .edges()
        .iter()
        .map(|e| {
            let x = e.length.to_f64();
            assert!(x >= 1.0 && x.fract() == 0.0, "integer lengths only");
            x as i64
        })
        .collect();
    let mut best: HashMap<Vec<i64>, i64> = HashMap::new();
    for base in 0..g.vertex_count() {
        let mut layers: Vec<HashSet<(usize, Vec<i64>)>> = vec![HashSet::new(); bound as usize + 1];
        layers[0].insert((base, vec![0; g.edge_count()]));
        for l in 0..=bound as usize {
            let states: Vec<(usize, Vec<i64>)> = layers[l].iter().cloned().collect();
            for (v, chain) in states {
                if v == base && l > 0 {
                    let e = best.entry(chain.clone()).or_insert(l as i64);
                    *e = (*e).min(l as i64);
                }
                for (i, edge) in g.edges().iter().enumerate() {
                    let next = l + lengths[i] as usize;
                    if next > bound as usize {
                        continue;
                    }
                    if edge.tail == v {
                        let mut c = chain.clone();
                        c[i] += 1;
                        layers[next].insert((edge.head, c));
                    }
                    if edge.head == v {
                        let mut c = chain.clone();
                        c[i] -= 1;
                        layers[next].insert((edge.tail, c));
                    }
                }
            }
        }
    }
    best
}

/// Connected multigraphs with loops allowed, at most `max_edges` edges and
/// first Betti number between 1 and `max_rank`, with lengths in 1..=3.
pub fn small_graphs(count: usize, max_edges: usize, max_rank: usize, seed: u64) -> Vec<MetricGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let v = rng.gen_range(1..=4usize);
        let e = rng.gen_range(v.max(1)..=max_edges);
        let mut g = MetricGraph::with_vertices(v);
        // spanning path first keeps it connected
        for i in 1..v {
            let j = rng.gen_range(0..i);
            g.add_edge(j, i, Real::int(rng.gen_range(1..=3)));
        }
        while g.edge_count() < e {
            let (a, b) = (rng.gen_range(0..v), rng.gen_range(0..v));
            g.add_edge(a, b, Real::int(rng.gen_range(1..=3)));
        }
        let rank = g.homology_rank();
        if (1..=max_rank).contains(&rank) {
            out.push(g);
        }
    }
    out
}

/// All integer vectors of length `n` with entries in `-k..=k`, except zero.
pub fn coefficient_box(n: usize, k: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-k..=k).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

/// Sum over spanning trees of the product of lengths of edges outside the
/// tree, by brute force over edge subsets. With unit lengths this is the
/// number of spanning trees.
pub fn cotree_length_sum(g: &MetricGraph) -> Real {
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let n = g.vertex_count();
    let e = g.edge_count();
    let mut total = Real::zero();
    for mask in 0u64..(1 << e) {
        if mask.count_ones() as usize + 1 != n {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        let mut ok = true;
        for (i, edge) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (a, b) = (find(&mut parent, edge.tail), find(&mut parent, edge.head));
                if a == b {
                    ok = false;
                    break;
                }
                parent[a] = b;
            }
        }
        if ok {
            let weight = (0..e).filter(|i| mask >> i & 1 == 0).fold(Real::one(), |acc, i| &acc * g.length(i));
            total = &total + &weight;
        }
    }
    total
}

/// Compares the cover-search minimal length with exhaustive enumeration
/// for every class with coordinates in `-k..=k`. Returns (checked,
/// mismatches).
pub fn compare_length_oracle(g: &MetricGraph, k: i64) -> (usize, Vec<String>) {
    use qgraph::homology::LengthTable;
    use qgraph::HomologyClass;
    let table = LengthTable::new(g.clone());
    let classes = coefficient_box(table.rank(), k);
    let mut expected = Vec::new();
    for c in &classes {
        let h = HomologyClass(c.clone());
        let l = table.length(&h).expect("valid class").expect("connected graph");
        expected.push((h.clone(), table.chain_of(&h), l));
    }
    let bound = expected.iter().map(|(_, _, l)| l.to_f64() as i64).max().unwrap_or(0);
    let brute = closed_walk_minima(g, bound);
    let mut bad = Vec::new();
    for (h, chain, l) in &expected {
        let got = brute.get(chain).copied();
        if got != Some(l.to_f64() as i64) {
            bad.push(format!("class {h}: cover {l}, enumeration {got:?}"));
        }
    }
    (expected.len(), bad)
}

/// A seeded sum of up to eight cosines with frequencies in (0.2, 6)
/// pairwise at least 0.25 apart and amplitudes in [0.5, 2].
pub fn random_cosine_sum(seed: u64) -> qgraph::frequency::CosineSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=8);
    let mut freqs: Vec<f64> = Vec::new();
    while freqs.len() < count {
        let f = rng.gen_range(0.2..6.0);
        if freqs.iter().all(|g: &f64| (g - f).abs() >= 0.25) {
            freqs.push(f);
        }
    }
    let constant = if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 };
    let terms = freqs.into_iter().map(|f| (f, rng.gen_range(0.5..2.0))).collect();
    qgraph::frequency::CosineSum::new(constant, terms)
}

/// Largest frequency or amplitude error after matching sorted frequencies;
/// `None` when the term counts differ.
pub fn cosine_error(truth: &qgraph::frequency::CosineSum, got: &qgraph::frequency::CosineParams) -> Option<f64> {
    let mut a = truth.terms.clone();
    a.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut b: Vec<(f64, f64)> = got.terms.iter().map(|t| (t.mu, t.nu)).collect();
    b.sort_by(|x, y| x.0.total_cmp(&y.0));
    if a.len() != b.len() {
        return None;
    }
    let mut err = (truth.constant - got.constant).abs();
    for (x, y) in a.iter().zip(&b) {
        err = err.max((x.0 - y.0).abs()).max((x.1 - y.1).abs());
    }
    Some(err)
}

pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { failure_persistence: None, ..proptest::test_runner::Config::with_cases(cases) }
}

/// Edge chain of a table class, through the oracle coordinates of an
/// oracle-backed table.
pub fn table_chain(
    table: &qgraph::frequency::FrequencyTable,
    lengths: &qgraph::homology::LengthTable,
    c: &qgraph::HomologyClass,
) -> Vec<i64> {
    let n = lengths.rank();
    let mut h = vec![0i64; n];
    for (k, b) in c.coords().iter().zip(table.basis_classes()) {
        for (x, y) in h.iter_mut().zip(b.coords()) {
            *x += k * y;
        }
    }
    lengths.chain_of(&qgraph::HomologyClass(h))
}

/// `Σ_e L_e a_e b_e`.
pub fn chain_product(g: &MetricGraph, a: &[i64], b: &[i64]) -> Real {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(_, (x, y))| **x != 0 && **y != 0)
        .map(|(e, (x, y))| g.length(e) * &Real::int(x * y))
        .fold(Real::zero(), |acc, v| &acc + &v)
}
