use std::collections::VecDeque;

use super::{BondId, MetricGraph};
use crate::error::{Error, Result};
use crate::real::Real;

/// A simple closed walk: no repeated vertex or edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    bonds: Vec<BondId>,
}

impl Cycle {
    pub fn new(g: &MetricGraph, bonds: Vec<BondId>) -> Result<Cycle> {
        if bonds.is_empty() {
            return Err(Error::NotACycle("empty bond sequence".into()));
        }
        let m = bonds.len();
        let mut seen_v = vec![false; g.vertex_count()];
        let mut seen_e = vec![false; g.edge_count()];
        for i in 0..m {
            let b = bonds[i];
            if b >= g.bond_count() {
                return Err(Error::NotACycle(format!("bond {b} out of range")));
            }
            if g.terminal(b) != g.origin(bonds[(i + 1) % m]) {
                return Err(Error::NotACycle(format!(
                    "bonds {} and {} are not incident",
                    b,
                    bonds[(i + 1) % m]
                )));
            }
            let v = g.origin(b);
            if seen_v[v] || seen_e[b / 2] {
                return Err(Error::NotACycle("repeated vertex or edge".into()));
            }
            seen_v[v] = true;
            seen_e[b / 2] = true;
        }
        Ok(Cycle { bonds })
    }

    pub(crate) fn from_bonds_unchecked(bonds: Vec<BondId>) -> Cycle {
        Cycle { bonds }
    }

    pub fn bonds(&self) -> &[BondId] {
        &self.bonds
    }

    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    pub fn edges(&self) -> Vec<usize> {
        self.bonds.iter().map(|b| b / 2).collect()
    }

    pub fn vertices(&self, g: &MetricGraph) -> Vec<usize> {
        self.bonds.iter().map(|&b| g.origin(b)).collect()
    }

    /// Signed edge usage: +1 when traversed tail to head, -1 otherwise.
    pub fn edge_chain(&self, edge_count: usize) -> Vec<i64> {
        bond_chain(&self.bonds, edge_count)
    }

    pub fn length(&self, g: &MetricGraph) -> Real {
        self.bonds.iter().map(|&b| g.bond_length(b)).sum()
    }

    pub fn reversed(&self) -> Cycle {
        Cycle {
            bonds: self.bonds.iter().rev().map(|b| b ^ 1).collect(),
        }
    }
}

/// Signed edge usage counts of a bond sequence.
pub fn bond_chain(bonds: &[BondId], edge_count: usize) -> Vec<i64> {
    let mut chain = vec![0; edge_count];
    for &b in bonds {
        chain[b / 2] += if b % 2 == 0 { 1 } else { -1 };
    }
    chain
}

/// A spanning forest together with the fundamental cycles of its
/// non-tree edges.
#[derive(Clone, Debug)]
pub struct CycleBasis {
    edge_count: usize,
    in_tree: Vec<bool>,
    non_tree: Vec<usize>,
    cycles: Vec<Cycle>,
    chains: Vec<Vec<i64>>,
}

impl CycleBasis {
    pub fn rank(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cycle(&self, i: usize) -> &Cycle {
        &self.cycles[i]
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.edge_count).filter(|&e| self.in_tree[e]).collect()
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.in_tree[e]
    }

    /// The non-tree edge owning basis cycle `i`.
    pub fn non_tree_edges(&self) -> &[usize] {
        &self.non_tree
    }

    pub fn basis_chains(&self) -> &[Vec<i64>] {
        &self.chains
    }

    /// Coordinates of a closed chain: its signed usage of the non-tree edges.
    pub fn coordinates(&self, chain: &[i64]) -> Result<Vec<i64>> {
        if chain.len() != self.edge_count {
            return Err(Error::MismatchedChains(chain.len(), self.edge_count));
        }
        Ok(self.non_tree.iter().map(|&e| chain[e]).collect())
    }

    pub fn walk_coordinates(&self, bonds: &[BondId]) -> Vec<i64> {
        let chain = bond_chain(bonds, self.edge_count);
        self.non_tree.iter().map(|&e| chain[e]).collect()
    }

    /// The closed chain with the given coordinates.
    pub fn chain_of(&self, coords: &[i64]) -> Vec<i64> {
        let mut chain = vec![0; self.edge_count];
        for (c, basis) in coords.iter().zip(&self.chains) {
            if *c != 0 {
                for (x, y) in chain.iter_mut().zip(basis) {
                    *x += c * y;
                }
            }
        }
        chain
    }
}

/// Fundamental cycles of a BFS tree rooted at vertex 0. Requires a
/// connected graph.
pub fn fundamental_cycle_basis(g: &MetricGraph) -> Result<CycleBasis> {
    let (_, count) = g.components();
    if count > 1 {
        return Err(Error::Disconnected(count));
    }
    Ok(forest_cycle_basis(g))
}

/// Fundamental cycles of a BFS forest, each tree rooted at the smallest
/// vertex of its component.
pub fn forest_cycle_basis(g: &MetricGraph) -> CycleBasis {
    let n = g.vertex_count();
    let out = g.outgoing();
    let mut parent_bond: Vec<Option<BondId>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut depth = vec![0usize; n];
    let mut in_tree = vec![false; g.edge_count()];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &b in &out[v] {
                let w = g.terminal(b);
                if !visited[w] {
                    visited[w] = true;
                    parent_bond[w] = Some(b);
                    depth[w] = depth[v] + 1;
                    in_tree[b / 2] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut non_tree = Vec::new();
    let mut cycles = Vec::new();
    let mut chains = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        if in_tree[e] {
            continue;
        }
        // forward bond, then the tree path from head back to tail
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut a, mut b) = (edge.head, edge.tail);
        while a != b {
            if depth[a] >= depth[b] {
                let p = parent_bond[a].expect("non-root has a parent");
                up.push(p ^ 1);
                a = g.origin(p);
            } else {
                let p = parent_bond[b].expect("non-root has a parent");
                down.push(p);
                b = g.origin(p);
            }
        }
        let mut bonds = vec![2 * e];
        bonds.extend(up);
        bonds.extend(down.into_iter().rev());
        let cycle = Cycle::from_bonds_unchecked(bonds);
        chains.push(cycle.edge_chain(g.edge_count()));
        cycles.push(cycle);
        non_tree.push(e);
    }
    CycleBasis {
        edge_count: g.edge_count(),
        in_tree,
        non_tree,
        cycles,
        chains,
    }
}

/// Every cycle of `g`, once each. The orientation is canonical: the
/// smallest edge comes first and is traversed tail to head.
pub fn enumerate_cycles(g: &MetricGraph) -> Vec<Cycle> {
    let out = g.outgoing();
    let mut found = Vec::new();
    let mut on_path = vec![false; g.vertex_count()];
    for (e0, edge) in g.edges().iter().enumerate() {
        if edge.is_loop() {
            found.push(Cycle::from_bonds_unchecked(vec![2 * e0]));
            continue;
        }
        let mut path = vec![2 * e0];
        on_path[edge.tail] = true;
        on_path[edge.head] = true;
        extend_cycles(g, &out, e0, edge.tail, &mut path, &mut on_path, &mut found);
        on_path[edge.tail] = false;
        on_path[edge.head] = false;
    }
    found
}

fn extend_cycles(
    g: &MetricGraph,
    out: &[Vec<BondId>],
    e0: usize,
    target: usize,
    path: &mut Vec<BondId>,
    on_path: &mut [bool],
    found: &mut Vec<Cycle>,
) {
    let v = g.terminal(*path.last().expect("path is nonempty"));
    for &b in &out[v] {
        if b / 2 <= e0 {
            continue;
        }
        let w = g.terminal(b);
        if w == target {
            path.push(b);
            found.push(Cycle::from_bonds_unchecked(path.clone()));
            path.pop();
        } else if !on_path[w] {
            on_path[w] = true;
            path.push(b);
            extend_cycles(g, out, e0, target, path, on_path, found);
            path.pop();
            on_path[w] = false;
        }
    }
}
