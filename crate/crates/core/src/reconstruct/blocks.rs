//! Block structure from lengths alone: generators grouped by shared edges,
//! block distances, and the block tree rebuilt from leaf distances.

use crate::error::{Error, Result};
use crate::frequency::{FrequencyTable, Lookup};
use crate::graph::{BlockTree, TreeNode};
use crate::homology::HomologyClass;
use crate::real::Real;

/// A weighted tree; `leaves[i]` is the node of input leaf `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafTree {
    pub node_count: usize,
    pub leaves: Vec<usize>,
    pub edges: Vec<(usize, usize, Real)>,
}

impl LeafTree {
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (k, (a, b, _)) in self.edges.iter().enumerate() {
            adj[*a].push((*b, k));
            adj[*b].push((*a, k));
        }
        adj
    }

    /// Edge indices on the path from `a` to `b`, in order.
    fn path(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        let adj = self.adjacency();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.node_count];
        let mut stack = vec![a];
        let mut seen = vec![false; self.node_count];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            for &(w, k) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, k));
                    stack.push(w);
                }
            }
        }
        let mut out = Vec::new();
        let mut v = b;
        while let Some((u, k)) = prev[v] {
            out.push((u, k));
            v = u;
        }
        out.reverse();
        out
    }

    /// Distances from `a` to every node.
    pub fn distances_from(&self, a: usize) -> Vec<Real> {
        let adj = self.adjacency();
        let mut d = vec![Real::zero(); self.node_count];
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            for &(w, k) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    d[w] = &d[v] + &self.edges[k].2;
                    stack.push(w);
                }
            }
        }
        d
    }
}

/// Rebuilds the tree whose leaf-to-leaf distances are `dist`, inserting
/// one leaf at a time where the three-point formula puts it.
pub fn tree_from_leaves(dist: &[Vec<Real>]) -> Result<LeafTree> {
    let n = dist.len();
    if dist.iter().any(|r| r.len() != n) {
        return Err(Error::NonAdditive("distance matrix is not square".into()));
    }
    let mut tree = LeafTree { node_count: 0, leaves: Vec::new(), edges: Vec::new() };
    if n == 0 {
        return Ok(tree);
    }
    tree.node_count = 1;
    tree.leaves.push(0);
    if n == 1 {
        return Ok(tree);
    }
    tree.node_count = 2;
    tree.leaves.push(1);
    tree.edges.push((0, 1, dist[0][1].clone()));
    for k in 2..n {
        // attachment point on the path from leaf 0 towards the leaf that
        // diverges from k latest
        let depth = |j: usize| (&dist[0][k] + &dist[0][j] - &dist[j][k]).half();
        let (j, a) = (1..k)
            .map(|j| (j, depth(j)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("at least two leaves placed");
        let branch = &dist[0][k] - &a;
        if a.signum() < 0 || branch.signum() < 0 {
            return Err(Error::NonAdditive(format!("negative branch while inserting leaf {k}")));
        }
        let mut along = Real::zero();
        let mut anchor = None;
        for (u, e) in tree.path(tree.leaves[0], tree.leaves[j]) {
            let (x, y, len) = tree.edges[e].clone();
            let v = if x == u { y } else { x };
            let end = &along + &len;
            if a.approx_eq(&along) {
                anchor = Some(u);
                break;
            }
            if a.lt_tol(&end) {
                // split the edge
                let mid = tree.node_count;
                tree.node_count += 1;
                tree.edges[e] = (u, mid, &a - &along);
                tree.edges.push((mid, v, &end - &a));
                anchor = Some(mid);
                break;
            }
            along = end;
            anchor = Some(v);
        }
        let mut anchor = anchor.ok_or_else(|| Error::NonAdditive(format!("no attachment for leaf {k}")))?;
        if tree.leaves.contains(&anchor) {
            // a leaf stays a leaf: put a junction at distance zero from it
            let mid = tree.node_count;
            tree.node_count += 1;
            for e in tree.edges.iter_mut() {
                if e.0 == anchor {
                    e.0 = mid;
                } else if e.1 == anchor {
                    e.1 = mid;
                }
            }
            tree.edges.push((anchor, mid, Real::zero()));
            anchor = mid;
        }
        let leaf = tree.node_count;
        tree.node_count += 1;
        tree.edges.push((anchor, leaf, branch));
        tree.leaves.push(leaf);
    }
    for i in 0..n {
        let d = tree.distances_from(tree.leaves[i]);
        for j in 0..n {
            if !d[tree.leaves[j]].approx_eq(&dist[i][j]) {
                return Err(Error::NonAdditive(format!(
                    "leaves {i} and {j}: tree gives {}, matrix says {}",
                    d[tree.leaves[j]],
                    dist[i][j]
                )));
            }
        }
    }
    Ok(tree)
}

/// The recovered block structure.
#[derive(Clone, Debug)]
pub struct BlockStructure {
    /// Generator indices per block.
    pub blocks: Vec<Vec<usize>>,
    pub distances: Vec<Vec<Real>>,
    /// Blocks found to lie between two others.
    pub inner: Vec<usize>,
    pub tree: BlockTree,
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Generators sharing an edge in either orientation, closed transitively.
pub fn block_partition(table: &FrequencyTable, generators: &[HomologyClass]) -> Result<Vec<Vec<usize>>> {
    let n = generators.len();
    let lengths: Vec<Real> = generators.iter().map(|g| table.length(g)).collect::<Result<_>>()?;
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let sum = &lengths[i] + &lengths[j];
            let mut share = false;
            for c in [&generators[i] + &generators[j], &generators[i] - &generators[j]] {
                if let Lookup::Known(l) = table.lookup(&c)? {
                    share |= l.lt_tol(&sum);
                }
            }
            if share {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[b] = a;
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    Ok(blocks)
}

/// `d(B, B') = ½ min (l(γ + γ') - l(γ) - l(γ'))` over generators of the two
/// blocks.
pub fn block_distances(
    table: &FrequencyTable,
    generators: &[HomologyClass],
    blocks: &[Vec<usize>],
) -> Result<Vec<Vec<Real>>> {
    let k = blocks.len();
    let lengths: Vec<Real> = generators.iter().map(|g| table.length(g)).collect::<Result<_>>()?;
    let mut d = vec![vec![Real::zero(); k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let mut best: Option<Real> = None;
            for &i in &blocks[a] {
                for &j in &blocks[b] {
                    let l = match table.lookup(&(&generators[i] + &generators[j]))? {
                        Lookup::Known(l) => l,
                        Lookup::Absent => {
                            return Err(Error::Inconsistent(format!("blocks {a} and {b} lie in different components")))
                        }
                    };
                    let gap = (l - &lengths[i] - &lengths[j]).half();
                    best = Some(match best {
                        Some(x) => x.min(gap),
                        None => gap,
                    });
                }
            }
            let best = best.expect("blocks are nonempty");
            if best.signum() < 0 {
                return Err(Error::Inconsistent(format!("blocks {a} and {b} overlap")));
            }
            d[a][b] = best.clone();
            d[b][a] = best;
        }
    }
    Ok(d)
}

/// Pieces of a block tree glued at named block nodes.
struct Pieces {
    tree: BlockTree,
    block_node: Vec<Option<usize>>,
}

impl Pieces {
    fn node_of(&mut self, block: usize, dims: &[usize]) -> usize {
        if let Some(v) = self.block_node[block] {
            return v;
        }
        let v = self.tree.add_node(TreeNode::Block { dim: dims[block] });
        self.block_node[block] = Some(v);
        v
    }
}

fn assemble(set: &[usize], d: &[Vec<Real>], dims: &[usize], pieces: &mut Pieces, inner: &mut Vec<usize>) -> Result<()> {
    // an inner block sits between two others: the triangle inequality fails
    let pivot = set.iter().copied().find(|&b1| {
        set.iter().any(|&b2| {
            set.iter().any(|&b3| {
                b1 != b2 && b1 != b3 && b2 != b3 && (&d[b1][b2] + &d[b1][b3]).lt_tol(&d[b2][b3])
            })
        })
    });
    match pivot {
        Some(b1) => {
            inner.push(b1);
            let rest: Vec<usize> = set.iter().copied().filter(|&b| b != b1).collect();
            let mut parent: Vec<usize> = (0..rest.len()).collect();
            for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    let (bi, bj) = (rest[i], rest[j]);
                    if d[bi][bj].le_tol(&(&d[b1][bi] + &d[b1][bj])) {
                        let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                        parent[y] = x;
                    }
                }
            }
            let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for i in 0..rest.len() {
                let r = find(&mut parent, i);
                groups.entry(r).or_default().push(rest[i]);
            }
            if groups.len() < 2 {
                return Err(Error::Inconsistent(format!("inner block {b1} has a single attachment")));
            }
            for (_, mut g) in groups {
                g.push(b1);
                g.sort_unstable();
                assemble(&g, d, dims, pieces, inner)?;
            }
            Ok(())
        }
        None => {
            let sub: Vec<Vec<Real>> = set.iter().map(|&a| set.iter().map(|&b| d[a][b].clone()).collect()).collect();
            let lt = tree_from_leaves(&sub)?;
            let mut map = vec![usize::MAX; lt.node_count];
            for (i, &node) in lt.leaves.iter().enumerate() {
                map[node] = pieces.node_of(set[i], dims);
            }
            for m in map.iter_mut() {
                if *m == usize::MAX {
                    *m = pieces.tree.add_node(TreeNode::Junction);
                }
            }
            for (a, b, l) in lt.edges {
                pieces.tree.add_link(map[a], map[b], l);
            }
            Ok(())
        }
    }
}

/// Blocks, their homology dimensions and the tree joining them, from the
/// minimal lengths of a cycle basis and its pairwise sums.
pub fn block_structure(table: &FrequencyTable, generators: &[HomologyClass]) -> Result<BlockStructure> {
    let blocks = block_partition(table, generators)?;
    let distances = block_distances(table, generators, &blocks)?;
    let dims: Vec<usize> = blocks.iter().map(Vec::len).collect();
    let mut pieces = Pieces { tree: BlockTree::default(), block_node: vec![None; blocks.len()] };
    let mut inner = Vec::new();
    if blocks.len() == 1 {
        pieces.node_of(0, &dims);
    } else if !blocks.is_empty() {
        let all: Vec<usize> = (0..blocks.len()).collect();
        assemble(&all, &distances, &dims, &mut pieces, &mut inner)?;
    }
    let mut tree = pieces.tree;
    tree.simplify();
    if !tree.is_tree() {
        return Err(Error::Inconsistent("recovered block structure is not a tree".into()));
    }
    inner.sort_unstable();
    inner.dedup();
    Ok(BlockStructure { blocks, distances, inner, tree })
}
