//! Named graphs used by the tests and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::MetricGraph;
use crate::real::Real;

/// A single edge between two leaves.
pub fn interval(length: Real) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(2);
    g.add_edge(0, 1, length);
    g
}

/// One vertex with one loop. Has a degree-2 vertex.
pub fn circle(length: Real) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(1);
    g.add_edge(0, 0, length);
    g
}

/// Centre 0 joined to one leaf per length.
pub fn star(lengths: &[i64]) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(lengths.len() + 1);
    for (i, &l) in lengths.iter().enumerate() {
        g.add_edge(0, i + 1, Real::int(l));
    }
    g
}

/// Parallel edges from vertex 0 to vertex 1.
pub fn theta(lengths: &[i64]) -> MetricGraph {
    theta_with(&lengths.iter().map(|&l| Real::int(l)).collect::<Vec<_>>())
}

pub fn theta_with(lengths: &[Real]) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(2);
    for l in lengths {
        g.add_edge(0, 1, l.clone());
    }
    g
}

/// Two loops at one vertex.
pub fn figure_eight(a: i64, b: i64) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(1);
    g.add_edge(0, 0, Real::int(a));
    g.add_edge(0, 0, Real::int(b));
    g
}

/// Complete graph on `n` vertices with edges in lexicographic order.
pub fn complete(n: usize, lengths: &[Real]) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(i, j, lengths[k].clone());
            k += 1;
        }
    }
    g
}

pub fn complete_unit(n: usize) -> MetricGraph {
    complete(n, &vec![Real::one(); n * (n - 1) / 2])
}

pub fn k4_unit() -> MetricGraph {
    complete_unit(4)
}

/// K4 with edges 01, 02, 03, 12, 13, 23.
pub fn k4_with_lengths(lengths: &[i64]) -> MetricGraph {
    complete(
        4,
        &lengths.iter().map(|&l| Real::int(l)).collect::<Vec<_>>(),
    )
}

pub fn k33_unit() -> MetricGraph {
    let mut g = MetricGraph::with_vertices(6);
    for i in 0..3 {
        for j in 3..6 {
            g.add_edge(i, j, Real::one());
        }
    }
    g
}

/// The 3-cube on vertices 0..8, adjacent when labels differ in one bit.
pub fn cube_unit() -> MetricGraph {
    let mut g = MetricGraph::with_vertices(8);
    for v in 0..8usize {
        for bit in [1, 2, 4] {
            if v & bit == 0 {
                g.add_edge(v, v | bit, Real::one());
            }
        }
    }
    g
}

/// Triangular prism: triangles 012 and 345 with rungs i to i+3.
pub fn prism_unit() -> MetricGraph {
    let mut g = MetricGraph::with_vertices(6);
    for (u, v) in [
        (0, 1),
        (1, 2),
        (2, 0),
        (3, 4),
        (4, 5),
        (5, 3),
        (0, 3),
        (1, 4),
        (2, 5),
    ] {
        g.add_edge(u, v, Real::one());
    }
    g
}

/// Wheel with hub 0 and `rim` spokes.
pub fn wheel_unit(rim: usize) -> MetricGraph {
    let mut g = MetricGraph::with_vertices(rim + 1);
    for i in 1..=rim {
        g.add_edge(0, i, Real::one());
    }
    for i in 1..=rim {
        g.add_edge(i, i % rim + 1, Real::one());
    }
    g
}

fn add_unit_triangle(g: &mut MetricGraph) -> [usize; 3] {
    let base = g.vertex_count();
    for _ in 0..3 {
        g.add_vertex((g.vertex_count()).to_string());
    }
    for (u, v) in [(0, 1), (1, 2), (2, 0)] {
        g.add_edge(base + u, base + v, Real::one());
    }
    [base, base + 1, base + 2]
}

/// Unit triangles joined in a row by bridges of the given lengths. Each
/// bridge leaves a triangle from a different corner than the one it
/// arrived at. Corners without a bridge have degree 2.
pub fn triangle_chain(bridges: &[i64]) -> MetricGraph {
    let mut g = MetricGraph::new();
    let mut prev = add_unit_triangle(&mut g);
    for &l in bridges {
        let next = add_unit_triangle(&mut g);
        g.add_edge(prev[2], next[0], Real::int(l));
        prev = next;
    }
    g
}

/// Two unit triangles and a bridge of length 5.
pub fn two_block_chain() -> MetricGraph {
    triangle_chain(&[5])
}

/// Three unit triangles with bridges 2 and 3.
pub fn three_block_chain() -> MetricGraph {
    triangle_chain(&[2, 3])
}

/// Replaces every length by a seeded random rational in [1/2, 2] with
/// denominator 16.
pub fn with_random_rational_lengths(g: &MetricGraph, seed: u64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = g.clone();
    for e in 0..out.edge_count() {
        out.set_length(e, Real::ratio(rng.gen_range(8..=32), 16));
    }
    out
}

/// Replaces every length by a seeded random float in [1/2, 2].
pub fn with_random_float_lengths(g: &MetricGraph, seed: u64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = g.clone();
    for e in 0..out.edge_count() {
        out.set_length(e, Real::float(rng.gen_range(0.5..=2.0)));
    }
    out
}

/// Fixtures that only validate with degree-2 vertices allowed.
pub const DEGREE_TWO: &[&str] = &["circle", "two-block", "three-block"];

/// Every named fixture.
pub fn catalogue() -> Vec<(&'static str, MetricGraph)> {
    vec![
        ("interval", interval(Real::float(std::f64::consts::PI))),
        ("circle", circle(Real::float(2.0 * std::f64::consts::PI))),
        ("star3", star(&[1, 1, 1])),
        ("theta", theta(&[1, 2, 3])),
        ("theta-unit", theta(&[1, 1, 1])),
        ("figure8", figure_eight(2, 3)),
        ("k4", k4_unit()),
        ("k5", complete_unit(5)),
        ("k33", k33_unit()),
        ("cube", cube_unit()),
        ("prism", prism_unit()),
        ("wheel4", wheel_unit(4)),
        ("wheel5", wheel_unit(5)),
        ("two-block", two_block_chain()),
        ("three-block", three_block_chain()),
        (
            "figure8+theta",
            figure_eight(2, 3).disjoint_union(&theta(&[1, 2, 3])),
        ),
        ("k4+star", k4_unit().disjoint_union(&star(&[1, 1, 1]))),
    ]
}

pub fn by_name(name: &str) -> Option<MetricGraph> {
    catalogue()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, g)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_valid() {
        for (name, g) in catalogue() {
            let r = g.validate(DEGREE_TWO.contains(&name));
            assert!(r.is_valid(), "{name}: {:?}", r.violations);
        }
    }

    #[test]
    fn random_lengths_are_seeded() {
        let a = with_random_rational_lengths(&k4_unit(), 7);
        let b = with_random_rational_lengths(&k4_unit(), 7);
        assert_eq!(a, b);
        assert!(a.is_exact());
        for e in a.edges() {
            assert!(e.length >= Real::ratio(1, 2) && e.length <= Real::int(2));
        }
    }
}
