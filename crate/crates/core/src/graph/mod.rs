//! Metric multigraphs and combinatorial oracles.
//!
//! Edges are stored once; each edge `e` carries two bonds (oriented
//! copies): `2e` runs tail to head and `2e + 1` runs head to tail.

mod blocks;
mod connectivity;
mod cycles;
mod embed;
mod iso;

use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

pub use blocks::{
    attachments, biconnected_blocks, block_decomposition, Block, BlockDecomposition, BlockTree,
    TreeNode,
};
pub use connectivity::{is_k_connected, spanning_tree_count};
pub use cycles::{
    bond_chain, enumerate_cycles, forest_cycle_basis, fundamental_cycle_basis, Cycle, CycleBasis,
};
pub use embed::{is_planar, planar_embedding, RotationSystem, ROTATION_SEARCH_CAP};
pub use iso::{cycle_length_multiset, find_isomorphism, max_length_error, Isomorphism};

pub type BondId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub label: String,
    pub tail: usize,
    pub head: usize,
    pub length: Real,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// An oriented edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bond {
    pub edge: usize,
    pub forward: bool,
    pub origin: usize,
    pub terminal: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPositiveLength { edge: String },
    NonFiniteLength { edge: String },
    DanglingEndpoint { edge: String, vertex: usize },
    DegreeTwo { vertex: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveLength { edge } => {
                write!(f, "edge {edge} has non-positive length")
            }
            Violation::NonFiniteLength { edge } => write!(f, "edge {edge} has non-finite length"),
            Violation::DanglingEndpoint { edge, vertex } => {
                write!(f, "edge {edge} references missing vertex #{vertex}")
            }
            Violation::DegreeTwo { vertex } => write!(f, "vertex {vertex} has degree 2"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub degrees: Vec<usize>,
    pub components: usize,
    pub total_length: Real,
    pub euler_characteristic: i64,
    /// `|E| - |V| + #components`.
    pub homology_rank: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<ValidationReport> {
        if self.violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(self.violations))
        }
    }
}

impl MetricGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// A graph with vertices labelled `0..n`.
    pub fn with_vertices(n: usize) -> Self {
        MetricGraph {
            vertices: (0..n).map(|i| i.to_string()).collect(),
            edges: Vec::new(),
        }
    }

    /// Builds a graph from `(tail, head, length)` triples on `n` vertices.
    pub fn from_edges<L: Into<Real> + Clone>(n: usize, edges: &[(usize, usize, L)]) -> Self {
        let mut g = Self::with_vertices(n);
        for (u, v, l) in edges {
            g.add_edge(*u, *v, l.clone().into());
        }
        g
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> usize {
        self.vertices.push(label.into());
        self.vertices.len() - 1
    }

    /// Adds an edge labelled by its index. Endpoints are not checked here;
    /// [`MetricGraph::validate`] reports dangling ones.
    pub fn add_edge(&mut self, tail: usize, head: usize, length: Real) -> usize {
        let label = self.edges.len().to_string();
        self.add_labeled_edge(label, tail, head, length)
    }

    pub fn add_labeled_edge(
        &mut self,
        label: impl Into<String>,
        tail: usize,
        head: usize,
        length: Real,
    ) -> usize {
        self.edges.push(Edge {
            label: label.into(),
            tail,
            head,
            length,
        });
        self.edges.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn bond_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn length(&self, e: usize) -> &Real {
        &self.edges[e].length
    }

    pub fn set_length(&mut self, e: usize, length: Real) {
        self.edges[e].length = length;
    }

    pub fn lengths_f64(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length.to_f64()).collect()
    }

    /// Whether every edge length is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.edges.iter().all(|e| e.length.is_exact())
    }

    /// Copy with all lengths converted to floating point.
    pub fn to_float(&self) -> MetricGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length = e.length.to_float();
        }
        g
    }

    pub fn total_length(&self) -> Real {
        self.edges.iter().map(|e| &e.length).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for e in &self.edges {
            if let Some(x) = d.get_mut(e.tail) {
                *x += 1;
            }
            if let Some(x) = d.get_mut(e.head) {
                *x += 1;
            }
        }
        d
    }

    pub fn bond(&self, b: BondId) -> Bond {
        let e = &self.edges[b / 2];
        let forward = b.is_multiple_of(2);
        let (origin, terminal) = if forward {
            (e.tail, e.head)
        } else {
            (e.head, e.tail)
        };
        Bond {
            edge: b / 2,
            forward,
            origin,
            terminal,
        }
    }

    pub fn origin(&self, b: BondId) -> usize {
        let e = &self.edges[b / 2];
        if b.is_multiple_of(2) {
            e.tail
        } else {
            e.head
        }
    }

    pub fn terminal(&self, b: BondId) -> usize {
        let e = &self.edges[b / 2];
        if b.is_multiple_of(2) {
            e.head
        } else {
            e.tail
        }
    }

    pub fn bond_length(&self, b: BondId) -> &Real {
        &self.edges[b / 2].length
    }

    /// Bonds leaving each vertex, in bond order.
    pub fn outgoing(&self) -> Vec<Vec<BondId>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for b in 0..self.bond_count() {
            out[self.origin(b)].push(b);
        }
        out
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            if e.tail < n && e.head < n {
                let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut out = vec![0; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[v] = label[r];
        }
        (out, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    pub fn homology_rank(&self) -> usize {
        let (_, c) = self.components();
        self.edges.len() + c - self.vertices.len()
    }

    pub fn validate(&self, allow_degree_two: bool) -> ValidationReport {
        let n = self.vertices.len();
        let mut violations = Vec::new();
        for e in &self.edges {
            if !e.length.is_finite() {
                violations.push(Violation::NonFiniteLength {
                    edge: e.label.clone(),
                });
            } else if e.length.signum() <= 0 {
                violations.push(Violation::NonPositiveLength {
                    edge: e.label.clone(),
                });
            }
            for v in [e.tail, e.head] {
                if v >= n {
                    violations.push(Violation::DanglingEndpoint {
                        edge: e.label.clone(),
                        vertex: v,
                    });
                }
            }
        }
        let degrees = self.degrees();
        if !allow_degree_two {
            for (v, &d) in degrees.iter().enumerate() {
                if d == 2 {
                    violations.push(Violation::DegreeTwo {
                        vertex: self.vertices[v].clone(),
                    });
                }
            }
        }
        let dangling = violations
            .iter()
            .any(|v| matches!(v, Violation::DanglingEndpoint { .. }));
        let components = if dangling { 0 } else { self.components().1 };
        ValidationReport {
            vertex_count: n,
            edge_count: self.edges.len(),
            degrees,
            components,
            total_length: self.total_length(),
            euler_characteristic: self.euler_characteristic(),
            homology_rank: (self.edges.len() + components).saturating_sub(n),
            violations,
        }
    }

    /// Disjoint union; vertices of `other` are relabelled with a suffix
    /// when their labels collide.
    pub fn disjoint_union(&self, other: &MetricGraph) -> MetricGraph {
        let mut g = self.clone();
        let offset = g.vertices.len();
        for label in &other.vertices {
            let l = if g.vertices.contains(label) {
                format!("{label}'")
            } else {
                label.clone()
            };
            g.vertices.push(l);
        }
        for e in &other.edges {
            let label = if g.edges.iter().any(|x| x.label == e.label) {
                format!("{}'", e.label)
            } else {
                e.label.clone()
            };
            g.edges.push(Edge {
                label,
                tail: e.tail + offset,
                head: e.head + offset,
                length: e.length.clone(),
            });
        }
        g
    }

    /// Connected components as separate graphs, with the original vertex
    /// and edge indices of each.
    pub fn split_components(&self) -> Vec<(MetricGraph, Vec<usize>, Vec<usize>)> {
        let (label, count) = self.components();
        let mut parts: Vec<(MetricGraph, Vec<usize>, Vec<usize>)> = (0..count)
            .map(|_| (MetricGraph::new(), Vec::new(), Vec::new()))
            .collect();
        let mut local = vec![0; self.vertices.len()];
        for (v, &c) in label.iter().enumerate() {
            local[v] = parts[c].0.add_vertex(self.vertices[v].clone());
            parts[c].1.push(v);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let c = label[e.tail];
            parts[c].0.add_labeled_edge(
                e.label.clone(),
                local[e.tail],
                local[e.head],
                e.length.clone(),
            );
            parts[c].2.push(i);
        }
        parts
    }

    /// The subgraph on a set of edges, keeping only their endpoints.
    pub fn edge_subgraph(&self, edges: &[usize]) -> (MetricGraph, Vec<usize>) {
        let mut g = MetricGraph::new();
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut original = Vec::new();
        for &e in edges {
            let edge = &self.edges[e];
            for v in [edge.tail, edge.head] {
                if map[v] == usize::MAX {
                    map[v] = g.add_vertex(self.vertices[v].clone());
                    original.push(v);
                }
            }
            g.add_labeled_edge(
                edge.label.clone(),
                map[edge.tail],
                map[edge.head],
                edge.length.clone(),
            );
        }
        (g, original)
    }
}
