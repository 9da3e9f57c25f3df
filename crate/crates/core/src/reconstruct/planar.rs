//! Faces, duals and edge lengths for planar graphs, read off from a basis
//! of oriented cycles without positive overlap.

use std::fmt;

use num::ToPrimitive;

use super::cycles::{decompositions, is_cycle_class};
use crate::error::{Error, Result};
use crate::frequency::{FrequencyTable, Lookup};
use crate::graph::{is_k_connected, planar_embedding, MetricGraph};
use crate::homology::HomologyClass;
use crate::real::{solve_in_span, Real};

/// Splits the minimal orbit of `c` into cycles by repeatedly taking the
/// shortest decomposition.
pub fn cycle_decomposition(table: &FrequencyTable, c: &HomologyClass) -> Result<Vec<HomologyClass>> {
    let mut out = Vec::new();
    let mut stack = vec![c.clone()];
    while let Some(x) = stack.pop() {
        if out.len() + stack.len() > 64 {
            return Err(Error::Inconsistent(format!("decomposition of {c} does not terminate")));
        }
        if is_cycle_class(table, &x)? {
            out.push(x);
            continue;
        }
        let d = decompositions(table, &x)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Inconsistent(format!("{x} is neither a cycle nor decomposable")))?;
        stack.push(d.second);
        stack.push(d.first);
    }
    Ok(out)
}

/// Number of edges two face cycles share: the pieces of `γ_i + γ_j`,
/// less the pairs of pieces that touch at a single vertex.
pub fn shared_edge_count(table: &FrequencyTable, a: &HomologyClass, b: &HomologyClass) -> Result<usize> {
    let c = a + b;
    if c.is_zero() {
        return Err(Error::Inconsistent("opposite cycles: shared edges are not determined".into()));
    }
    let sum = table.length(a)? + table.length(b)?;
    let lc = match table.lookup(&c)? {
        Lookup::Known(l) => l,
        Lookup::Absent => return Ok(0),
    };
    if !lc.lt_tol(&sum) {
        return Ok(0);
    }
    let table = &ensure_rows(table, &lc)?;
    let pieces = cycle_decomposition(table, &c)?;
    let lengths: Vec<Real> = pieces.iter().map(|p| table.length(p)).collect::<Result<_>>()?;
    let mut touching = 0;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let joined = &pieces[i] + &pieces[j];
            if joined.is_zero() {
                continue;
            }
            if let Lookup::Known(l) = table.lookup(&joined)? {
                if l.approx_eq(&(&lengths[i] + &lengths[j])) {
                    touching += 1;
                }
            }
        }
    }
    pieces
        .len()
        .checked_sub(touching)
        .ok_or_else(|| Error::Inconsistent(format!("{touching} contacts among {} pieces", pieces.len())))
}

fn ensure_rows(table: &FrequencyTable, l: &Real) -> Result<FrequencyTable> {
    if l.le_tol(table.l_max()) {
        Ok(table.clone())
    } else {
        table.extend_to(l)
    }
}

/// Faces as vertices, shared edges as edge multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct DualGraph {
    /// `γ_0 = -Σ γ_i` first, then the basis faces.
    pub faces: Vec<HomologyClass>,
    pub face_lengths: Vec<Real>,
    pub multiplicity: Vec<Vec<usize>>,
    pub caveat: Option<String>,
}

impl DualGraph {
    pub fn vertex_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        let n = self.faces.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.multiplicity[i][j]).sum()
    }

    /// The dual as a multigraph with unit lengths; vertex `i` is face `i`.
    pub fn to_graph(&self) -> MetricGraph {
        let n = self.faces.len();
        let mut g = MetricGraph::new();
        for i in 0..n {
            g.add_vertex(format!("f{i}"));
        }
        for i in 0..n {
            for j in i + 1..n {
                for _ in 0..self.multiplicity[i][j] {
                    g.add_edge(i, j, Real::one());
                }
            }
        }
        g
    }
}

impl fmt::Display for DualGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} faces, {} edges", self.vertex_count(), self.edge_count())?;
        for (i, row) in self.multiplicity.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|m| m.to_string()).collect();
            writeln!(f, "f{i} {} [{}]", self.faces[i], cells.join(" "))?;
        }
        if let Some(c) = &self.caveat {
            writeln!(f, "caveat: {c}")?;
        }
        Ok(())
    }
}

/// The dual determined by a basis of faces of one block.
pub fn build_dual(table: &FrequencyTable, witness: &[HomologyClass], edge_count: Option<usize>) -> Result<DualGraph> {
    let n = witness.len();
    if n == 0 {
        return Err(Error::Inconsistent("a dual needs at least one face".into()));
    }
    let rank = witness[0].rank();
    let outer = witness.iter().fold(HomologyClass::zero(rank), |acc, g| &acc - g);
    let mut faces = vec![outer];
    faces.extend(witness.iter().cloned());
    let face_lengths: Vec<Real> = faces.iter().map(|f| table.length(f)).collect::<Result<_>>()?;
    let mut multiplicity = vec![vec![0usize; n + 1]; n + 1];
    let mut caveat = None;
    if n == 1 {
        multiplicity[0][1] = 1;
        multiplicity[1][0] = 1;
        caveat = Some("a lone cycle: its edge count is not determined".into());
    } else {
        for i in 0..=n {
            for j in i + 1..=n {
                let m = shared_edge_count(table, &faces[i], &faces[j])?;
                multiplicity[i][j] = m;
                multiplicity[j][i] = m;
            }
        }
    }
    let dual = DualGraph { faces, face_lengths, multiplicity, caveat };
    if let Some(e) = edge_count {
        if dual.caveat.is_none() && dual.edge_count() != e {
            return Err(Error::Inconsistent(format!("dual has {} edges, graph has {e}", dual.edge_count())));
        }
    }
    Ok(dual)
}

/// A combinatorial graph recovered from a dual, with the face of the
/// primal that corresponds to each dual vertex.
#[derive(Clone, Debug)]
pub struct Primal {
    /// Unit edge lengths.
    pub graph: MetricGraph,
    /// Signed edge chain of the face for each dual vertex, consistently
    /// oriented so that they sum to zero.
    pub face_chains: Vec<Vec<i64>>,
    /// Whether the recovered graph is determined by its dual: it is
    /// 3-connected, or a bundle of parallel edges.
    pub unique: bool,
}

/// Embeds the dual, traces its faces and returns the geometric dual of
/// that embedding.
pub fn dual_to_primal(dual: &DualGraph) -> Result<Primal> {
    let d = dual.to_graph();
    let rot = planar_embedding(&d)?.ok_or(Error::NotEmbeddable)?;
    let faces = rot.faces(&d);
    let mut face_of = vec![usize::MAX; d.bond_count()];
    for (f, bonds) in faces.iter().enumerate() {
        for &b in bonds {
            face_of[b] = f;
        }
    }
    let mut g = MetricGraph::new();
    for i in 0..faces.len() {
        g.add_vertex(format!("v{i}"));
    }
    for e in 0..d.edge_count() {
        g.add_edge(face_of[2 * e], face_of[2 * e + 1], Real::one());
    }
    let mut face_chains = vec![vec![0i64; d.edge_count()]; d.vertex_count()];
    for (u, bonds) in rot.rotation.iter().enumerate() {
        for &b in bonds {
            face_chains[u][b / 2] += if b % 2 == 0 { 1 } else { -1 };
        }
    }
    let bundle = g.vertex_count() == 2 && g.edges().iter().all(|e| e.tail != e.head);
    let unique = bundle || is_k_connected(&g, 3);
    Ok(Primal { graph: g, face_chains, unique })
}

fn simple_paths(g: &MetricGraph, from: usize, to: usize, skip_edge: usize, cap: usize) -> Vec<Vec<usize>> {
    let out = g.outgoing();
    let mut paths = Vec::new();
    let mut on_path = vec![false; g.vertex_count()];
    let mut bonds = Vec::new();
    fn dfs(
        g: &MetricGraph,
        out: &[Vec<usize>],
        v: usize,
        to: usize,
        skip: usize,
        on_path: &mut [bool],
        bonds: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if paths.len() >= cap {
            return;
        }
        if v == to {
            paths.push(bonds.clone());
            return;
        }
        on_path[v] = true;
        for &b in &out[v] {
            let w = g.terminal(b);
            if b / 2 == skip || on_path[w] {
                continue;
            }
            bonds.push(b);
            dfs(g, out, w, to, skip, on_path, bonds, paths, cap);
            bonds.pop();
        }
        on_path[v] = false;
    }
    dfs(g, &out, from, to, skip_edge, &mut on_path, &mut bonds, &mut paths, cap);
    paths
}

const PATH_CAP: usize = 200_000;

/// Two paths between the ends of `e`, avoiding `e`, sharing no edge and no
/// inner vertex. Fewest total edges first.
fn disjoint_path_pair(g: &MetricGraph, e: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let edge = g.edge(e);
    let (u, v) = (edge.tail, edge.head);
    let mut paths = simple_paths(g, u, v, e, PATH_CAP);
    paths.sort_by_key(|p| (p.len(), p.clone()));
    let inner = |p: &[usize]| -> Vec<usize> { p.iter().map(|&b| g.terminal(b)).filter(|&w| w != v).collect() };
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..paths.len() {
        let ai = inner(&paths[i]);
        for j in i + 1..paths.len() {
            let total = paths[i].len() + paths[j].len();
            if best.is_some_and(|b| b.0 <= total) {
                break;
            }
            let bj = inner(&paths[j]);
            let shares_vertex = ai.iter().any(|w| bj.contains(w));
            let shares_edge = paths[i].iter().any(|b| paths[j].iter().any(|c| b / 2 == c / 2));
            if !shares_vertex && !shares_edge {
                best = Some((total, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (paths[i].clone(), paths[j].clone()))
}

/// Recovers every edge length of `primal` from minimal lengths, with
/// `faces[i]` the table class of the face of dual vertex `i`: for two
/// cycles `c1`, `c2` through `e` that are otherwise disjoint and
/// `c3 = c1 - c2`, `2 l(e) = l(c1) + l(c2) - l(c3)`.
pub fn recover_edge_lengths(table: &FrequencyTable, primal: &Primal, faces: &[HomologyClass]) -> Result<MetricGraph> {
    let g = &primal.graph;
    let m = g.edge_count();
    if faces.len() != primal.face_chains.len() {
        return Err(Error::Inconsistent(format!(
            "{} face classes for {} faces",
            faces.len(),
            primal.face_chains.len()
        )));
    }
    // faces other than the outer one span the cycle space
    let span = &primal.face_chains[1..];
    let class_of = |chain: &[i64]| -> Result<HomologyClass> {
        let x = solve_in_span(span, chain)
            .filter(|x| x.iter().all(|q| q.is_integer()))
            .ok_or_else(|| Error::Inconsistent("cycle outside the span of the faces".into()))?;
        let rank = faces[0].rank();
        let mut h = vec![0i64; rank];
        for (q, f) in x.iter().zip(&faces[1..]) {
            let a = q.to_integer().to_i64().ok_or_else(|| Error::Inconsistent("coefficient overflow".into()))?;
            for (hk, fk) in h.iter_mut().zip(f.coords()) {
                *hk += a * fk;
            }
        }
        Ok(HomologyClass(h))
    };
    let chain = |bonds: &[usize]| crate::graph::bond_chain(bonds, m);
    let mut out = g.clone();
    for e in 0..m {
        let edge = g.edge(e);
        let length = if edge.tail == edge.head {
            let mut c = vec![0i64; m];
            c[e] = 1;
            table.length(&class_of(&c)?)?
        } else {
            let (p1, p2) = disjoint_path_pair(g, e)
                .ok_or_else(|| Error::Inconsistent(format!("edge {e}: no two disjoint detours; graph is not 3-connected")))?;
            let (z1, z2) = (chain(&p1), chain(&p2));
            let mut c1 = vec![0i64; m];
            let mut c2 = vec![0i64; m];
            c1[e] = 1;
            c2[e] = 1;
            for k in 0..m {
                c1[k] -= z1[k];
                c2[k] -= z2[k];
            }
            let c3: Vec<i64> = (0..m).map(|k| z2[k] - z1[k]).collect();
            let l1 = table.length(&class_of(&c1)?)?;
            let l2 = table.length(&class_of(&c2)?)?;
            let l3 = table.length(&class_of(&c3)?)?;
            (l1 + l2 - l3).half()
        };
        if length.signum() <= 0 || length.approx_eq(&Real::zero()) {
            return Err(Error::Inconsistent(format!("edge {e} solved to nonpositive length {length}")));
        }
        out.set_length(e, length);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;
    use crate::reconstruct::cycles::{non_positive_basis, prepare_table};

    fn witness(g: &MetricGraph) -> (FrequencyTable, Vec<HomologyClass>) {
        let t = FrequencyTable::oracle_for(g, &Real::int(3)).unwrap();
        let (t, cap) = prepare_table(&t).unwrap();
        let w = non_positive_basis(&t, &cap).unwrap().expect("planar");
        (t, w)
    }

    #[test]
    fn theta_dual_is_a_triangle() {
        let g = fixtures::theta(&[1, 2, 3]);
        let (t, w) = witness(&g);
        let dual = build_dual(&t, &w, Some(3)).unwrap();
        assert_eq!(dual.multiplicity, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        let p = dual_to_primal(&dual).unwrap();
        assert!(p.unique);
        let rec = recover_edge_lengths(&t, &p, &dual.faces).unwrap();
        let mut ls: Vec<Real> = rec.edges().iter().map(|e| e.length.clone()).collect();
        ls.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(ls, vec![Real::int(1), Real::int(2), Real::int(3)]);
    }

    #[test]
    fn k4_is_self_dual_and_lengths_come_back() {
        let g = fixtures::k4_unit();
        let (t, w) = witness(&g);
        let dual = build_dual(&t, &w, Some(6)).unwrap();
        let dg = dual.to_graph();
        assert!(crate::graph::find_isomorphism(&dg, &g, None).is_some());
        let p = dual_to_primal(&dual).unwrap();
        let rec = recover_edge_lengths(&t, &p, &dual.faces).unwrap();
        assert!(rec.edges().iter().all(|e| e.length == Real::int(1)));
    }

    #[test]
    fn cube_faces_share_one_or_no_edge() {
        let g = fixtures::cube_unit();
        let (t, w) = witness(&g);
        let dual = build_dual(&t, &w, Some(12)).unwrap();
        for i in 0..6 {
            let row = &dual.multiplicity[i];
            assert_eq!(row.iter().filter(|&&m| m == 1).count(), 4);
            assert_eq!(row.iter().filter(|&&m| m == 0).count(), 2);
        }
    }
}
