use super::{block_decomposition, BondId, MetricGraph};
use crate::error::{Error, Result};

/// Rotation-system searches larger than this are refused.
pub const ROTATION_SEARCH_CAP: u64 = 20_000_000;

/// Cyclic order of outgoing bonds at each vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationSystem {
    pub rotation: Vec<Vec<BondId>>,
}

impl RotationSystem {
    fn successor_table(&self, bond_count: usize) -> Vec<BondId> {
        let mut succ = vec![usize::MAX; bond_count];
        for rot in &self.rotation {
            for (i, &b) in rot.iter().enumerate() {
                succ[b] = rot[(i + 1) % rot.len()];
            }
        }
        succ
    }

    /// Face boundaries: after arriving along `b`, leave along the bond
    /// following `b̄` in the rotation at the arrival vertex.
    pub fn faces(&self, g: &MetricGraph) -> Vec<Vec<BondId>> {
        let succ = self.successor_table(g.bond_count());
        let mut seen = vec![false; g.bond_count()];
        let mut faces = Vec::new();
        for start in 0..g.bond_count() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut b = start;
            while !seen[b] {
                seen[b] = true;
                face.push(b);
                b = succ[b ^ 1];
            }
            faces.push(face);
        }
        faces
    }

    pub fn face_count(&self, g: &MetricGraph) -> usize {
        self.faces(g).len()
    }

    /// Euler relation summed over components.
    pub fn is_planar(&self, g: &MetricGraph) -> bool {
        let (_, c) = g.components();
        let f = self.face_count(g) as i64;
        // each isolated vertex contributes one face of its own in the sum
        let isolated = g.degrees().iter().filter(|&&d| d == 0).count() as i64;
        g.vertex_count() as i64 - g.edge_count() as i64 + f + isolated == 2 * c as i64
    }
}

fn search_size(out: &[Vec<BondId>]) -> u64 {
    out.iter()
        .map(|o| (1..o.len().max(1) as u64).product::<u64>().max(1))
        .fold(1u64, |acc, x| acc.saturating_mul(x))
}

/// Finds a planar rotation system by exhaustive search over rotations.
/// `Ok(None)` means none exists.
pub fn planar_embedding(g: &MetricGraph) -> Result<Option<RotationSystem>> {
    let out = g.outgoing();
    let size = search_size(&out);
    if size > ROTATION_SEARCH_CAP {
        return Err(Error::Refused(format!(
            "rotation search of {size} systems exceeds the cap"
        )));
    }
    // fix the first bond at each vertex and permute the rest
    let mut perms: Vec<Vec<Vec<BondId>>> = Vec::with_capacity(out.len());
    for o in &out {
        let mut list = Vec::new();
        if o.len() <= 2 {
            list.push(o.clone());
        } else {
            let mut rest = o[1..].to_vec();
            permutations(&mut rest, 0, &mut |p| {
                let mut r = vec![o[0]];
                r.extend_from_slice(p);
                list.push(r);
            });
        }
        perms.push(list);
    }
    let mut index = vec![0usize; out.len()];
    loop {
        let rs = RotationSystem {
            rotation: index
                .iter()
                .zip(&perms)
                .map(|(&i, p)| p[i].clone())
                .collect(),
        };
        if rs.is_planar(g) {
            return Ok(Some(rs));
        }
        let mut k = 0;
        loop {
            if k == index.len() {
                return Ok(None);
            }
            index[k] += 1;
            if index[k] < perms[k].len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

fn permutations(items: &mut Vec<BondId>, k: usize, emit: &mut impl FnMut(&[BondId])) {
    if k == items.len() {
        emit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, emit);
        items.swap(k, i);
    }
}

/// Planarity oracle. Loops and parallel edges are dropped, then each
/// block is tested separately.
pub fn is_planar(g: &MetricGraph) -> Result<bool> {
    let mut simple = MetricGraph::with_vertices(g.vertex_count());
    let mut present = std::collections::BTreeSet::new();
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let key = (e.tail.min(e.head), e.tail.max(e.head));
        if present.insert(key) {
            simple.add_edge(key.0, key.1, e.length.clone());
        }
    }
    for block in block_decomposition(&simple).blocks {
        let (sub, _) = simple.edge_subgraph(&block.edges);
        let (v, e) = (sub.vertex_count(), sub.edge_count());
        if v >= 3 && e > 3 * v - 6 {
            return Ok(false);
        }
        if planar_embedding(&sub)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    #[test]
    fn classical_verdicts() {
        assert!(is_planar(&fixtures::k4_unit()).unwrap());
        assert!(is_planar(&fixtures::cube_unit()).unwrap());
        assert!(is_planar(&fixtures::prism_unit()).unwrap());
        assert!(is_planar(&fixtures::wheel_unit(5)).unwrap());
        assert!(!is_planar(&fixtures::complete_unit(5)).unwrap());
        assert!(!is_planar(&fixtures::k33_unit()).unwrap());
    }

    #[test]
    fn k4_embedding_has_four_faces() {
        let g = fixtures::k4_unit();
        let rs = planar_embedding(&g).unwrap().unwrap();
        let faces = rs.faces(&g);
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn theta_embedding_faces() {
        let g = fixtures::theta(&[1, 2, 3]);
        let rs = planar_embedding(&g).unwrap().unwrap();
        assert_eq!(rs.face_count(&g), 3);
    }
}
