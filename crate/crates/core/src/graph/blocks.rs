use std::collections::BTreeMap;

use super::MetricGraph;
use crate::real::Real;

/// A maximal set of edges in which any two lie on a common cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Rank of the block's first homology.
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub bridges: Vec<usize>,
    pub cut_vertices: Vec<usize>,
}

/// Biconnected components of a multigraph. Loops are blocks of their
/// own; bridges are listed separately and belong to no block.
pub fn block_decomposition(g: &MetricGraph) -> BlockDecomposition {
    let n = g.vertex_count();
    let out = g.outgoing();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();

    for (e, edge) in g.edges().iter().enumerate() {
        if edge.is_loop() {
            components.push(vec![e]);
        }
    }

    // iterative DFS; each frame is (vertex, parent edge, next outgoing index)
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        while let Some(&mut (v, parent_edge, ref mut next)) = stack.last_mut() {
            if *next < out[v].len() {
                let b = out[v][*next];
                *next += 1;
                let e = b / 2;
                if g.edge(e).is_loop() || Some(e) == parent_edge {
                    continue;
                }
                let w = g.terminal(b);
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    edge_stack.push(e);
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let e = parent_edge.expect("child frame has a parent edge");
                        let mut comp = Vec::new();
                        while let Some(x) = edge_stack.pop() {
                            comp.push(x);
                            if x == e {
                                break;
                            }
                        }
                        components.push(comp);
                    }
                }
            }
        }
    }

    let mut blocks = Vec::new();
    let mut bridges = Vec::new();
    for mut comp in components {
        comp.sort_unstable();
        if comp.len() == 1 && !g.edge(comp[0]).is_loop() {
            bridges.push(comp[0]);
            continue;
        }
        let mut vertices: Vec<usize> = comp
            .iter()
            .flat_map(|&e| [g.edge(e).tail, g.edge(e).head])
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        let dim = comp.len() + 1 - vertices.len();
        blocks.push(Block {
            edges: comp,
            vertices,
            dim,
        });
    }
    blocks.sort_by(|a, b| a.edges[0].cmp(&b.edges[0]));
    bridges.sort_unstable();

    let mut touching = vec![0usize; n];
    for b in &blocks {
        for &v in &b.vertices {
            touching[v] += 1;
        }
    }
    for &e in &bridges {
        touching[g.edge(e).tail] += 1;
        touching[g.edge(e).head] += 1;
    }
    let degrees = g.degrees();
    let cut_vertices = (0..n)
        .filter(|&v| touching[v] >= 2 && degrees[v] >= 2)
        .collect();
    BlockDecomposition {
        blocks,
        bridges,
        cut_vertices,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Block { dim: usize },
    Junction,
}

/// Blocks as fat vertices joined by weighted links. A link of length 0
/// joins blocks sharing a cut vertex.
#[derive(Clone, Debug, Default)]
pub struct BlockTree {
    pub nodes: Vec<TreeNode>,
    pub links: Vec<(usize, usize, Real)>,
}

impl BlockTree {
    pub fn add_node(&mut self, node: TreeNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn add_link(&mut self, a: usize, b: usize, length: Real) {
        self.links.push((a, b, length));
    }

    pub fn block_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Block { .. }))
            .count()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Block { dim } => Some(*dim),
                TreeNode::Junction => None,
            })
            .collect();
        d.sort_unstable();
        d
    }

    pub fn total_dim(&self) -> usize {
        self.block_dims().iter().sum()
    }

    /// Connected and acyclic.
    pub fn is_tree(&self) -> bool {
        if self.nodes.is_empty() {
            return self.links.is_empty();
        }
        if self.links.len() + 1 != self.nodes.len() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (a, b, _) in &self.links {
            let (x, y) = (find(&mut parent, *a), find(&mut parent, *b));
            if x == y {
                return false;
            }
            parent[x] = y;
        }
        true
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (a, b, l) in &self.links {
            adj[*a].push((*b, l.to_f64()));
            adj[*b].push((*a, l.to_f64()));
        }
        adj
    }

    /// Removes degree-2 junctions by merging their two links, then
    /// junctions that are leaves.
    pub fn simplify(&mut self) {
        loop {
            let mut deg = vec![0usize; self.nodes.len()];
            for (a, b, _) in &self.links {
                deg[*a] += 1;
                deg[*b] += 1;
            }
            let target =
                (0..self.nodes.len()).find(|&v| self.nodes[v] == TreeNode::Junction && deg[v] <= 2);
            let Some(v) = target else { break };
            let incident: Vec<usize> = (0..self.links.len())
                .filter(|&i| self.links[i].0 == v || self.links[i].1 == v)
                .collect();
            if incident.len() == 2 {
                let (i, j) = (incident[0], incident[1]);
                let other = |k: usize| {
                    if self.links[k].0 == v {
                        self.links[k].1
                    } else {
                        self.links[k].0
                    }
                };
                let merged = (
                    other(i),
                    other(j),
                    self.links[i].2.clone() + self.links[j].2.clone(),
                );
                self.links.remove(j);
                self.links.remove(i);
                self.links.push(merged);
            } else if incident.len() == 1 {
                self.links.remove(incident[0]);
            }
            self.remove_node(v);
        }
    }

    fn remove_node(&mut self, v: usize) {
        self.nodes.remove(v);
        for (a, b, _) in &mut self.links {
            if *a > v {
                *a -= 1;
            }
            if *b > v {
                *b -= 1;
            }
        }
    }

    /// Canonical string of the tree as an unrooted labelled tree with link
    /// lengths rounded to six decimals.
    pub fn canonical_form(&self) -> String {
        let adj = self.adjacency();
        (0..self.nodes.len())
            .map(|r| self.rooted_form(&adj, r, usize::MAX))
            .min()
            .unwrap_or_default()
    }

    fn rooted_form(&self, adj: &[Vec<(usize, f64)>], v: usize, parent: usize) -> String {
        let label = match self.nodes[v] {
            TreeNode::Block { dim } => format!("B{dim}"),
            TreeNode::Junction => "J".to_string(),
        };
        let mut children: Vec<String> = adj[v]
            .iter()
            .filter(|(w, _)| *w != parent)
            .map(|&(w, l)| format!("{:.6}:{}", l + 0.0, self.rooted_form(adj, w, v)))
            .collect();
        children.sort();
        format!("{label}({})", children.join(","))
    }

    pub fn is_isomorphic(&self, other: &BlockTree) -> bool {
        self.nodes.len() == other.nodes.len() && self.canonical_form() == other.canonical_form()
    }
}

/// The block tree of a graph: blocks joined through cut vertices and
/// bridges, with pendant trees removed.
pub fn biconnected_blocks(g: &MetricGraph) -> BlockTree {
    let dec = block_decomposition(g);
    let mut tree = BlockTree::default();
    // vertex nodes first, so indices line up with graph vertices
    for _ in 0..g.vertex_count() {
        tree.add_node(TreeNode::Junction);
    }
    for block in &dec.blocks {
        let b = tree.add_node(TreeNode::Block { dim: block.dim });
        for &v in &block.vertices {
            if dec.cut_vertices.contains(&v) {
                tree.add_link(b, v, Real::zero());
            }
        }
    }
    for &e in &dec.bridges {
        let edge = g.edge(e);
        tree.add_link(edge.tail, edge.head, edge.length.clone());
    }
    // isolated vertices that are not cut vertices carry no links and vanish
    tree.simplify();
    tree
}

/// Groups of block indices keyed by cut vertex, for callers that need the
/// attachment points.
pub fn attachments(dec: &BlockDecomposition) -> BTreeMap<usize, Vec<usize>> {
    let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, b) in dec.blocks.iter().enumerate() {
        for &v in &b.vertices {
            if dec.cut_vertices.contains(&v) {
                map.entry(v).or_default().push(i);
            }
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    #[test]
    fn two_triangles_and_bridge() {
        let g = fixtures::two_block_chain();
        let t = biconnected_blocks(&g);
        assert_eq!(t.block_dims(), vec![1, 1]);
        assert_eq!(t.links.len(), 1);
        assert_eq!(t.links[0].2, Real::int(5));
        assert!(t.is_tree());
    }

    #[test]
    fn k4_single_block() {
        let t = biconnected_blocks(&fixtures::k4_unit());
        assert_eq!(t.block_dims(), vec![3]);
        assert!(t.links.is_empty());
    }

    #[test]
    fn figure_eight_blocks_touch() {
        let t = biconnected_blocks(&fixtures::figure_eight(2, 3));
        assert_eq!(t.block_dims(), vec![1, 1]);
        assert_eq!(t.links, vec![(0, 1, Real::zero())]);
    }

    #[test]
    fn three_chain_is_a_path() {
        let t = biconnected_blocks(&fixtures::three_block_chain());
        assert_eq!(t.block_count(), 3);
        assert_eq!(t.nodes.len(), 3);
        let mut lengths: Vec<Real> = t.links.iter().map(|l| l.2.clone()).collect();
        lengths.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(lengths, vec![Real::int(2), Real::int(3)]);
    }

    #[test]
    fn pendant_trees_are_ignored() {
        let mut g = fixtures::k4_unit();
        let v = g.add_vertex("leaf");
        g.add_edge(0, v, Real::int(7));
        let t = biconnected_blocks(&g);
        assert_eq!(t.block_dims(), vec![3]);
        assert!(t.links.is_empty());
    }

    #[test]
    fn canonical_form_ignores_labelling() {
        let mut a = BlockTree::default();
        let x = a.add_node(TreeNode::Block { dim: 1 });
        let y = a.add_node(TreeNode::Block { dim: 2 });
        a.add_link(x, y, Real::int(4));
        let mut b = BlockTree::default();
        let y = b.add_node(TreeNode::Block { dim: 2 });
        let x = b.add_node(TreeNode::Block { dim: 1 });
        b.add_link(y, x, Real::float(4.0));
        assert!(a.is_isomorphic(&b));
    }
}
