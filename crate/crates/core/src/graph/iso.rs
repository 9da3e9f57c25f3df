use super::{enumerate_cycles, MetricGraph};
use crate::real::Real;

/// A vertex bijection together with the induced edge bijection.
#[derive(Clone, Debug, PartialEq)]
pub struct Isomorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

/// Edges between each unordered vertex pair, by index.
fn pair_edges(g: &MetricGraph) -> Vec<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    let mut m = vec![vec![Vec::new(); n]; n];
    for (i, e) in g.edges().iter().enumerate() {
        m[e.tail][e.head].push(i);
        if e.tail != e.head {
            m[e.head][e.tail].push(i);
        }
    }
    m
}

fn sorted_lengths(g: &MetricGraph, edges: &[usize]) -> Vec<f64> {
    let mut l: Vec<f64> = edges.iter().map(|&e| g.length(e).to_f64()).collect();
    l.sort_by(f64::total_cmp);
    l
}

fn bundles_match(
    a: &MetricGraph,
    ea: &[usize],
    b: &MetricGraph,
    eb: &[usize],
    tol: Option<f64>,
) -> bool {
    if ea.len() != eb.len() {
        return false;
    }
    match tol {
        None => true,
        Some(t) => sorted_lengths(a, ea)
            .iter()
            .zip(sorted_lengths(b, eb))
            .all(|(x, y)| (x - y).abs() <= t * x.abs().max(1.0)),
    }
}

/// Searches for an isomorphism from `a` to `b`. With `tol` set, parallel
/// edge bundles must also agree in their sorted lengths up to `tol`.
pub fn find_isomorphism(a: &MetricGraph, b: &MetricGraph, tol: Option<f64>) -> Option<Isomorphism> {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let (da, db) = (a.degrees(), b.degrees());
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let (pa, pb) = (pair_edges(a), pair_edges(b));
    // high degree first, then neighbours of what is already placed
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = order.iter().filter(|&&u| !pa[v][u].is_empty()).count();
                (links, da[v], std::cmp::Reverse(v))
            })
            .expect("unplaced vertex exists");
        placed[next] = true;
        order.push(next);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !assign(
        a, b, &pa, &pb, &da, &db, &order, 0, &mut map, &mut used, tol,
    ) {
        return None;
    }
    let mut edge_map = vec![usize::MAX; a.edge_count()];
    for u in 0..n {
        for v in u..n {
            let mut ea = pa[u][v].clone();
            let mut eb = pb[map[u]][map[v]].clone();
            ea.sort_by(|&x, &y| a.length(x).to_f64().total_cmp(&a.length(y).to_f64()));
            eb.sort_by(|&x, &y| b.length(x).to_f64().total_cmp(&b.length(y).to_f64()));
            for (x, y) in ea.into_iter().zip(eb) {
                edge_map[x] = y;
            }
        }
    }
    Some(Isomorphism {
        vertex_map: map,
        edge_map,
    })
}

#[allow(clippy::too_many_arguments)]
fn assign(
    a: &MetricGraph,
    b: &MetricGraph,
    pa: &[Vec<Vec<usize>>],
    pb: &[Vec<Vec<usize>>],
    da: &[usize],
    db: &[usize],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
    tol: Option<f64>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for w in 0..b.vertex_count() {
        if used[w] || db[w] != da[v] || !bundles_match(a, &pa[v][v], b, &pb[w][w], tol) {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| bundles_match(a, &pa[v][u], b, &pb[w][map[u]], tol));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if assign(a, b, pa, pb, da, db, order, depth + 1, map, used, tol) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}

/// Largest absolute length difference across an edge bijection.
pub fn max_length_error(a: &MetricGraph, b: &MetricGraph, iso: &Isomorphism) -> Real {
    iso.edge_map
        .iter()
        .enumerate()
        .map(|(x, &y)| (a.length(x).clone() - b.length(y).clone()).abs())
        .fold(Real::zero(), Real::max)
}

/// Sorted lengths of all cycles. Equal for 2-isomorphic graphs with
/// matching lengths.
pub fn cycle_length_multiset(g: &MetricGraph) -> Vec<Real> {
    let mut l: Vec<Real> = enumerate_cycles(g).iter().map(|c| c.length(g)).collect();
    l.sort_by(|x, y| x.total_cmp(y));
    l
}
