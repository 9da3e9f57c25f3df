//! The edge-length inner product on chains and minimal orbit lengths per
//! homology class.
//!
//! Minimal lengths are shortest paths in the free abelian cover: a state
//! is a vertex together with the integer coordinates accumulated so far,
//! and crossing the non-tree edge of basis cycle `i` shifts coordinate
//! `i` by one.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::RwLock;

use num::{BigInt, BigRational, Integer, One, ToPrimitive};

use crate::error::{Error, Result};
use crate::graph::{
    bond_chain, forest_cycle_basis, fundamental_cycle_basis, BondId, Cycle, CycleBasis, MetricGraph,
};
use crate::real::{integer_determinant, Real, TOLERANCE};

/// Default bound on the number of stored witnesses per class.
pub const WITNESS_CAP: usize = 64;

/// Abelian-cover searches visiting more states than this are refused.
pub const STATE_CAP: usize = 4_000_000;

/// Integer coordinates with respect to a fundamental cycle basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyClass(pub Vec<i64>);

impl HomologyClass {
    pub fn zero(rank: usize) -> Self {
        HomologyClass(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        HomologyClass(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        HomologyClass(self.0.iter().map(|x| x * k).collect())
    }

    /// The representative of `{h, -h}` whose first nonzero entry is positive.
    pub fn canonical_sign(&self) -> Self {
        match self.0.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => -self,
            _ => self.clone(),
        }
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl From<Vec<i64>> for HomologyClass {
    fn from(v: Vec<i64>) -> Self {
        HomologyClass(v)
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Neg for &HomologyClass {
    type Output = HomologyClass;
    fn neg(self) -> HomologyClass {
        HomologyClass(self.0.iter().map(|x| -x).collect())
    }
}

impl Neg for HomologyClass {
    type Output = HomologyClass;
    fn neg(self) -> HomologyClass {
        -&self
    }
}

impl Add for &HomologyClass {
    type Output = HomologyClass;
    fn add(self, o: &HomologyClass) -> HomologyClass {
        HomologyClass(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &HomologyClass {
    type Output = HomologyClass;
    fn sub(self, o: &HomologyClass) -> HomologyClass {
        HomologyClass(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

/// `sum_e c1[e] c2[e] L_e` over integer edge chains.
pub fn c1_inner_product(g: &MetricGraph, c1: &[i64], c2: &[i64]) -> Result<Real> {
    if c1.len() != g.edge_count() || c2.len() != g.edge_count() {
        return Err(Error::MismatchedChains(c1.len(), c2.len()));
    }
    Ok(c1
        .iter()
        .zip(c2)
        .zip(g.edges())
        .filter(|((a, b), _)| **a != 0 && **b != 0)
        .map(|((a, b), e)| e.length.scale(a * b))
        .sum())
}

pub fn cycle_inner_product(g: &MetricGraph, c1: &Cycle, c2: &Cycle) -> Real {
    let m = g.edge_count();
    c1_inner_product(g, &c1.edge_chain(m), &c2.edge_chain(m)).expect("chains sized by the graph")
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapProfile {
    /// Total length of shared edges traversed in the same direction.
    pub positive: Real,
    /// Total length of shared edges traversed in opposite directions.
    pub negative: Real,
    pub shared_edges: usize,
}

pub fn overlap_profile(g: &MetricGraph, c1: &Cycle, c2: &Cycle) -> Result<OverlapProfile> {
    Cycle::new(g, c1.bonds().to_vec())?;
    Cycle::new(g, c2.bonds().to_vec())?;
    let m = g.edge_count();
    let (a, b) = (c1.edge_chain(m), c2.edge_chain(m));
    let mut profile = OverlapProfile {
        positive: Real::zero(),
        negative: Real::zero(),
        shared_edges: 0,
    };
    for e in 0..m {
        if a[e] == 0 || b[e] == 0 {
            continue;
        }
        profile.shared_edges += 1;
        if a[e] == b[e] {
            profile.positive = profile.positive + g.length(e);
        } else {
            profile.negative = profile.negative + g.length(e);
        }
    }
    Ok(profile)
}

/// Gram matrix of oriented cycles under the edge-length inner product.
/// The cycles must form a basis of the integral first homology.
pub fn albanese_gram_direct(g: &MetricGraph, basis: &[Cycle]) -> Result<Vec<Vec<Real>>> {
    let fundamental = fundamental_cycle_basis(g)?;
    if basis.len() != fundamental.rank() {
        return Err(Error::NonSpanningBasis);
    }
    let coords: Vec<Vec<i64>> = basis
        .iter()
        .map(|c| fundamental.walk_coordinates(c.bonds()))
        .collect();
    let det = integer_determinant(&coords);
    if det != BigInt::one() && det != -BigInt::one() {
        return Err(Error::NonSpanningBasis);
    }
    Ok(basis
        .iter()
        .map(|a| basis.iter().map(|b| cycle_inner_product(g, a, b)).collect())
        .collect())
}

/// Lexicographically smallest rotation of a cyclic bond sequence.
pub fn canonical_rotation(bonds: &[BondId]) -> Vec<BondId> {
    let n = bonds.len();
    (0..n)
        .map(|s| {
            bonds[s..]
                .iter()
                .chain(&bonds[..s])
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

/// Cancels adjacent `b b̄` pairs, cyclically.
pub fn reduce_backtracks(bonds: &[BondId]) -> Vec<BondId> {
    let mut out: Vec<BondId> = Vec::with_capacity(bonds.len());
    for &b in bonds {
        if out.last() == Some(&(b ^ 1)) {
            out.pop();
        } else {
            out.push(b);
        }
    }
    while out.len() >= 2 && out[0] == out[out.len() - 1] ^ 1 {
        out.pop();
        out.remove(0);
    }
    out
}

/// Edge lengths either as integers over a common denominator or as floats.
#[derive(Clone, Debug)]
enum Weights {
    Scaled {
        weights: Vec<u128>,
        denominator: BigInt,
    },
    Float(Vec<f64>),
}

impl Weights {
    fn of(g: &MetricGraph) -> Weights {
        if g.is_exact() {
            let denominator = g
                .edges()
                .iter()
                .map(|e| e.length.as_exact().expect("exact").denom().clone())
                .fold(BigInt::one(), |a, d| a.lcm(&d));
            let scaled: Option<Vec<u128>> = g
                .edges()
                .iter()
                .map(|e| {
                    let q = e.length.as_exact().expect("exact");
                    (q.numer() * (&denominator / q.denom())).to_u128()
                })
                .collect();
            if let Some(weights) = scaled {
                if weights.iter().all(|&w| w < (1u128 << 80)) {
                    return Weights::Scaled {
                        weights,
                        denominator,
                    };
                }
            }
        }
        Weights::Float(g.lengths_f64())
    }
}

/// A cost usable by the cover search: exact integers or tolerant floats.
trait Cost: Copy + PartialOrd + Add<Output = Self> + fmt::Debug {
    const ZERO: Self;
    fn near(self, other: Self) -> bool;
    fn key(self) -> u128;
}

impl Cost for u128 {
    const ZERO: Self = 0;
    fn near(self, other: Self) -> bool {
        self == other
    }
    fn key(self) -> u128 {
        self
    }
}

impl Cost for f64 {
    const ZERO: Self = 0.0;
    fn near(self, other: Self) -> bool {
        (self - other).abs() <= TOLERANCE * self.abs().max(other.abs()).max(1.0)
    }
    fn key(self) -> u128 {
        // order-preserving for non-negative floats
        self.to_bits() as u128
    }
}

struct CoverGraph<'a> {
    g: &'a MetricGraph,
    out: Vec<Vec<BondId>>,
    /// Basis index of each edge's non-tree role, if any.
    slot: Vec<Option<usize>>,
    rank: usize,
}

impl<'a> CoverGraph<'a> {
    fn new(g: &'a MetricGraph, basis: &CycleBasis) -> Self {
        let mut slot = vec![None; g.edge_count()];
        for (i, &e) in basis.non_tree_edges().iter().enumerate() {
            slot[e] = Some(i);
        }
        CoverGraph {
            g,
            out: g.outgoing(),
            slot,
            rank: basis.rank(),
        }
    }

    fn step(&self, coords: &[i64], b: BondId) -> Vec<i64> {
        let mut next = coords.to_vec();
        if let Some(i) = self.slot[b / 2] {
            next[i] += if b.is_multiple_of(2) { 1 } else { -1 };
        }
        next
    }
}

struct Search<C> {
    states: Vec<(usize, Vec<i64>)>,
    index: HashMap<(usize, Vec<i64>), usize>,
    dist: Vec<C>,
    preds: Vec<Vec<(usize, BondId)>>,
    settled: Vec<bool>,
}

impl<C: Cost> Search<C> {
    /// Dijkstra from `(start, 0)` over all states with distance at most
    /// `bound`. `stop` ends the search early once it returns true for a
    /// settled state.
    fn run(
        cover: &CoverGraph,
        weights: &[C],
        start: usize,
        bound: C,
        keep_preds: bool,
        mut stop: impl FnMut(usize, &[i64], C) -> bool,
    ) -> Result<Search<C>> {
        let mut s = Search {
            states: Vec::new(),
            index: HashMap::new(),
            dist: Vec::new(),
            preds: Vec::new(),
            settled: Vec::new(),
        };
        let origin = (start, vec![0; cover.rank]);
        s.index.insert(origin.clone(), 0);
        s.states.push(origin);
        s.dist.push(C::ZERO);
        s.preds.push(Vec::new());
        s.settled.push(false);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((C::ZERO.key(), 0usize)));
        while let Some(Reverse((_, i))) = heap.pop() {
            if s.settled[i] {
                continue;
            }
            s.settled[i] = true;
            let d = s.dist[i];
            let (v, coords) = s.states[i].clone();
            if stop(v, &coords, d) {
                break;
            }
            for &b in &cover.out[v] {
                let nd = d + weights[b / 2];
                if nd > bound && !nd.near(bound) {
                    continue;
                }
                let key = (cover.g.terminal(b), cover.step(&coords, b));
                let j = match s.index.get(&key) {
                    Some(&j) => j,
                    None => {
                        if s.states.len() >= STATE_CAP {
                            return Err(Error::Refused(format!(
                                "abelian cover search exceeded {STATE_CAP} states"
                            )));
                        }
                        let j = s.states.len();
                        s.index.insert(key.clone(), j);
                        s.states.push(key);
                        s.dist.push(nd);
                        s.preds.push(Vec::new());
                        s.settled.push(false);
                        if keep_preds {
                            s.preds[j].push((i, b));
                        }
                        heap.push(Reverse((nd.key(), j)));
                        continue;
                    }
                };
                if s.settled[j] {
                    if keep_preds && nd.near(s.dist[j]) && !s.preds[j].contains(&(i, b)) {
                        s.preds[j].push((i, b));
                    }
                    continue;
                }
                if nd.near(s.dist[j]) {
                    if keep_preds {
                        s.preds[j].push((i, b));
                    }
                } else if nd < s.dist[j] {
                    s.dist[j] = nd;
                    if keep_preds {
                        s.preds[j] = vec![(i, b)];
                    }
                    heap.push(Reverse((nd.key(), j)));
                }
            }
        }
        Ok(s)
    }

    /// Bond sequences of shortest paths from the origin to `target`.
    fn paths(&self, target: usize, cap: usize) -> Vec<Vec<BondId>> {
        let mut out = Vec::new();
        let mut stack = vec![(target, Vec::new())];
        while let Some((i, suffix)) = stack.pop() {
            if out.len() >= cap {
                break;
            }
            if i == 0 && !suffix.is_empty() {
                let mut p: Vec<BondId> = suffix.clone();
                p.reverse();
                out.push(p);
                continue;
            }
            for &(j, b) in &self.preds[i] {
                let mut s = suffix.clone();
                s.push(b);
                stack.push((j, s));
            }
        }
        out
    }
}

/// Length of a minimal periodic orbit in a class, with the minimal orbits
/// themselves as canonical rotations.
#[derive(Clone, Debug)]
pub struct MinimalOrbit {
    pub length: Real,
    pub witnesses: Vec<Vec<BondId>>,
    /// Whether more witnesses exist than were kept.
    pub truncated: bool,
}

fn to_real(c: u128, denominator: &BigInt) -> Real {
    Real::Exact(BigRational::new(BigInt::from(c), denominator.clone()))
}

/// Upper bound on `l(h)` for a class supported in one component: from the
/// component root walk to each basis cycle, go round it `|h_i|` times and
/// walk back.
fn detour_bound<C: Cost>(cover: &CoverGraph, basis: &CycleBasis, weights: &[C], h: &[i64]) -> C {
    let g = cover.g;
    let n = g.vertex_count();
    // tree distances from the root of each component
    let mut dist: Vec<Option<C>> = vec![None; n];
    let mut stack = Vec::new();
    for root in 0..n {
        if dist[root].is_some() {
            continue;
        }
        dist[root] = Some(C::ZERO);
        stack.push(root);
        while let Some(v) = stack.pop() {
            for &b in &cover.out[v] {
                if !basis.is_tree_edge(b / 2) {
                    continue;
                }
                let w = g.terminal(b);
                if dist[w].is_none() {
                    dist[w] = Some(dist[v].expect("visited") + weights[b / 2]);
                    stack.push(w);
                }
            }
        }
    }
    let mut total = C::ZERO;
    for (i, &k) in h.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let cycle = basis.cycle(i);
        let reach = dist[g.origin(cycle.bonds()[0])].unwrap_or(C::ZERO);
        let len = cycle
            .bonds()
            .iter()
            .fold(C::ZERO, |a, &b| a + weights[b / 2]);
        total = total + reach + reach;
        for _ in 0..k.abs() {
            total = total + len;
        }
    }
    total
}

fn minimal_orbit_with<C: Cost>(
    cover: &CoverGraph,
    basis: &CycleBasis,
    weights: &[C],
    h: &HomologyClass,
    witness_cap: usize,
) -> Result<(C, Vec<Vec<BondId>>, bool)> {
    let mut best = detour_bound(cover, basis, weights, h.coords());
    let n = cover.g.vertex_count();
    let mut found: Vec<(usize, C, Search<C>, usize)> = Vec::new();
    for v in 0..n {
        if cover.out[v].is_empty() {
            continue;
        }
        let target = h.coords().to_vec();
        let mut hit = None;
        let search = Search::run(cover, weights, v, best, witness_cap > 0, |w, coords, d| {
            if w == v && coords == target.as_slice() {
                hit = Some(d);
                return true;
            }
            false
        })?;
        if let Some(d) = hit {
            if d < best && !d.near(best) {
                best = d;
            }
            let idx = search.index[&(v, target)];
            found.push((v, d, search, idx));
        }
    }
    if found.is_empty() {
        return Err(Error::NoClosedWalk(h.to_string()));
    }
    let mut witnesses: Vec<Vec<BondId>> = Vec::new();
    let mut seen = HashSet::new();
    let mut truncated = false;
    if witness_cap > 0 {
        for (_, d, search, idx) in &found {
            if !d.near(best) {
                continue;
            }
            for p in search.paths(*idx, 16 * witness_cap) {
                let w = canonical_rotation(&reduce_backtracks(&p));
                if seen.insert(w.clone()) {
                    if witnesses.len() < witness_cap {
                        witnesses.push(w);
                    } else {
                        truncated = true;
                    }
                }
            }
        }
        witnesses.sort();
    }
    Ok((best, witnesses, truncated))
}

/// `l(h)` and its minimal orbits. Requires a connected graph and `h != 0`.
pub fn minimal_orbit_length(g: &MetricGraph, h: &HomologyClass) -> Result<MinimalOrbit> {
    let basis = fundamental_cycle_basis(g)?;
    minimal_orbit_in_basis(g, &basis, h, WITNESS_CAP)
}

/// As [`minimal_orbit_length`] with an explicit basis and witness cap
/// (`0` skips witnesses).
pub fn minimal_orbit_in_basis(
    g: &MetricGraph,
    basis: &CycleBasis,
    h: &HomologyClass,
    witness_cap: usize,
) -> Result<MinimalOrbit> {
    if h.rank() != basis.rank() {
        return Err(Error::WrongRank {
            expected: basis.rank(),
            got: h.rank(),
        });
    }
    if h.is_zero() {
        return Err(Error::TrivialClass);
    }
    let cover = CoverGraph::new(g, basis);
    match Weights::of(g) {
        Weights::Scaled {
            weights,
            denominator,
        } => {
            let (d, witnesses, truncated) =
                minimal_orbit_with(&cover, basis, &weights, h, witness_cap)?;
            Ok(MinimalOrbit {
                length: to_real(d, &denominator),
                witnesses,
                truncated,
            })
        }
        Weights::Float(weights) => {
            let (d, witnesses, truncated) =
                minimal_orbit_with(&cover, basis, &weights, h, witness_cap)?;
            Ok(MinimalOrbit {
                length: Real::float(d),
                witnesses,
                truncated,
            })
        }
    }
}

fn all_minimal_with<C: Cost>(
    cover: &CoverGraph,
    weights: &[C],
    l_max: C,
) -> Result<BTreeMap<Vec<i64>, C>> {
    let mut best: BTreeMap<Vec<i64>, C> = BTreeMap::new();
    for v in 0..cover.g.vertex_count() {
        if cover.out[v].is_empty() {
            continue;
        }
        let search = Search::run(cover, weights, v, l_max, false, |_, _, _| false)?;
        for (i, (w, coords)) in search.states.iter().enumerate() {
            if *w != v || !search.settled[i] || coords.iter().all(|&x| x == 0) {
                continue;
            }
            let d = search.dist[i];
            best.entry(coords.clone())
                .and_modify(|b| {
                    if d < *b {
                        *b = d
                    }
                })
                .or_insert(d);
        }
    }
    Ok(best)
}

/// Every nonzero class with `l(h) <= l_max`, with its minimal length.
pub fn all_minimal_lengths(
    g: &MetricGraph,
    basis: &CycleBasis,
    l_max: &Real,
) -> Result<BTreeMap<HomologyClass, Real>> {
    let cover = CoverGraph::new(g, basis);
    let out = match Weights::of(g) {
        Weights::Scaled {
            weights,
            denominator,
        } => {
            let bound = match l_max {
                Real::Exact(q) => (q * BigRational::from_integer(denominator.clone()))
                    .floor()
                    .to_integer(),
                Real::Float(x) => {
                    BigInt::from((x * denominator.to_f64().unwrap_or(f64::MAX)).floor() as u128)
                }
            };
            let bound = bound.to_u128().unwrap_or(u128::MAX / 2);
            all_minimal_with(&cover, &weights, bound)?
                .into_iter()
                .map(|(h, d)| (HomologyClass(h), to_real(d, &denominator)))
                .collect()
        }
        Weights::Float(weights) => all_minimal_with(&cover, &weights, l_max.to_f64())?
            .into_iter()
            .map(|(h, d)| (HomologyClass(h), Real::float(d)))
            .collect(),
    };
    Ok(out)
}

/// Lazily filled map from classes to minimal lengths, in the coordinates
/// of the spanning-forest basis. Reads run concurrently; each miss
/// computes and then inserts under the write lock.
pub struct LengthTable {
    graph: MetricGraph,
    basis: CycleBasis,
    cache: RwLock<HashMap<HomologyClass, Option<Real>>>,
}

impl LengthTable {
    pub fn new(graph: MetricGraph) -> LengthTable {
        let basis = forest_cycle_basis(&graph);
        LengthTable {
            graph,
            basis,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn basis(&self) -> &CycleBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    /// `l(h)`, or `None` when no closed walk has class `h` (a class mixing
    /// components).
    pub fn length(&self, h: &HomologyClass) -> Result<Option<Real>> {
        let key = h.canonical_sign();
        if let Some(l) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(l.clone());
        }
        let l = match minimal_orbit_in_basis(&self.graph, &self.basis, &key, 0) {
            Ok(m) => Some(m.length),
            Err(Error::NoClosedWalk(_)) => None,
            Err(e) => return Err(e),
        };
        self.cache
            .write()
            .expect("cache lock")
            .insert(key, l.clone());
        Ok(l)
    }

    pub fn minimal_orbit(&self, h: &HomologyClass) -> Result<MinimalOrbit> {
        minimal_orbit_in_basis(&self.graph, &self.basis, h, WITNESS_CAP)
    }

    /// Class of a closed bond walk.
    pub fn class_of(&self, bonds: &[BondId]) -> HomologyClass {
        HomologyClass(self.basis.walk_coordinates(bonds))
    }

    pub fn chain_of(&self, h: &HomologyClass) -> Vec<i64> {
        self.basis.chain_of(h.coords())
    }

    pub fn cached(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}

/// Signed edge usage of a closed walk.
pub fn walk_chain(g: &MetricGraph, bonds: &[BondId]) -> Vec<i64> {
    bond_chain(bonds, g.edge_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    fn h(v: &[i64]) -> HomologyClass {
        HomologyClass(v.to_vec())
    }

    #[test]
    fn figure_eight_sum_class() {
        let g = fixtures::figure_eight(2, 3);
        let m = minimal_orbit_length(&g, &h(&[1, 1])).unwrap();
        assert_eq!(m.length, Real::int(5));
        // both rotations of loop a then loop b collapse to one canonical walk
        assert_eq!(m.witnesses.len(), 1);
        assert_eq!(walk_chain(&g, &m.witnesses[0]), vec![1, 1]);
    }

    #[test]
    fn theta_classes() {
        let g = fixtures::theta(&[1, 2, 3]);
        let m = minimal_orbit_length(&g, &h(&[1, -1])).unwrap();
        assert_eq!(m.length, Real::int(5));
        assert_eq!(m.witnesses.len(), 1);
        assert_eq!(walk_chain(&g, &m.witnesses[0]), vec![0, 1, -1]);
        let m = minimal_orbit_length(&g, &h(&[1, 1])).unwrap();
        assert_eq!(m.length, Real::int(7));
        assert_eq!(walk_chain(&g, &m.witnesses[0]), vec![-2, 1, 1]);
    }

    #[test]
    fn trivial_class_rejected() {
        let g = fixtures::theta(&[1, 2, 3]);
        assert!(matches!(
            minimal_orbit_length(&g, &h(&[0, 0])),
            Err(Error::TrivialClass)
        ));
        assert!(matches!(
            minimal_orbit_length(&g, &h(&[1])),
            Err(Error::WrongRank { .. })
        ));
    }

    #[test]
    fn theta_gram() {
        let g = fixtures::theta(&[1, 2, 3]);
        let basis = fundamental_cycle_basis(&g).unwrap();
        let gram = albanese_gram_direct(&g, basis.cycles()).unwrap();
        assert_eq!(
            gram,
            vec![
                vec![Real::int(3), Real::int(1)],
                vec![Real::int(1), Real::int(4)]
            ]
        );
        let p = overlap_profile(&g, basis.cycle(0), basis.cycle(1)).unwrap();
        assert_eq!(
            p,
            OverlapProfile {
                positive: Real::one(),
                negative: Real::zero(),
                shared_edges: 1
            }
        );
    }

    #[test]
    fn non_spanning_basis_rejected() {
        let g = fixtures::theta(&[1, 2, 3]);
        let basis = fundamental_cycle_basis(&g).unwrap();
        let twice = vec![basis.cycle(0).clone(), basis.cycle(0).clone()];
        assert!(matches!(
            albanese_gram_direct(&g, &twice),
            Err(Error::NonSpanningBasis)
        ));
    }

    #[test]
    fn float_and_exact_agree() {
        let g = fixtures::with_random_rational_lengths(&fixtures::k4_unit(), 11);
        let f = g.to_float();
        let basis = fundamental_cycle_basis(&g).unwrap();
        for v in [[1, 0, 0], [1, 1, 0], [2, -1, 1], [0, 2, 2]] {
            let a = minimal_orbit_in_basis(&g, &basis, &h(&v), 0)
                .unwrap()
                .length;
            let b = minimal_orbit_in_basis(&f, &basis, &h(&v), 0)
                .unwrap()
                .length;
            assert!(a.is_exact());
            assert!((a.to_f64() - b.to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn bulk_lengths_match_single_queries() {
        let g = fixtures::k4_unit();
        let basis = fundamental_cycle_basis(&g).unwrap();
        let all = all_minimal_lengths(&g, &basis, &Real::int(6)).unwrap();
        assert!(!all.is_empty());
        for (class, l) in &all {
            assert_eq!(
                &minimal_orbit_in_basis(&g, &basis, class, 0).unwrap().length,
                l
            );
            assert!(all.contains_key(&-class));
        }
    }

    #[test]
    fn mixed_classes_have_no_walk() {
        let g = fixtures::figure_eight(2, 3).disjoint_union(&fixtures::theta(&[1, 2, 3]));
        let table = LengthTable::new(g);
        assert_eq!(table.rank(), 4);
        assert_eq!(table.length(&h(&[1, 1, 0, 0])).unwrap(), Some(Real::int(5)));
        assert_eq!(table.length(&h(&[0, 0, 1, 1])).unwrap(), Some(Real::int(7)));
        assert_eq!(table.length(&h(&[1, 0, 1, 0])).unwrap(), None);
    }

    #[test]
    fn backtracks_cancel_cyclically() {
        assert_eq!(reduce_backtracks(&[4, 0, 1, 6, 5]), vec![6]);
        assert_eq!(canonical_rotation(&[5, 2, 9]), vec![2, 9, 5]);
    }
}
