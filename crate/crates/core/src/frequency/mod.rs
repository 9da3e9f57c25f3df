//! Frequency tables: the observed frequencies `μ = |Ψ(h)|` along a generic
//! flux ray, their minimal orbit lengths, and the integer lattice they
//! generate.

mod components;
mod cosine;
mod lattice;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num::BigInt;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::homology::{all_minimal_lengths, HomologyClass, LengthTable};
use crate::io::{format_f64, format_real};
use crate::real::Real;
use crate::trace::{coefficient_signals, enumerate_orbits, CoefficientSignal, FluxRay, ORBIT_CAP};

pub use components::{split_components, ComponentSplit};
pub use cosine::{
    recover_by_derivatives, recover_by_recurrence, recover_cosine_params, simplest_between, step_for, window_for,
    CosineParams, CosineSignal, CosineSum, CosineTerm, Method, RecurrenceOptions, CERTIFY_MOMENTS,
};
pub use lattice::{group_basis, hermite_basis, integer_relation, lll_reduce, GroupBasis, RELATION_BOUND};

/// Relative tolerance for matching frequencies recovered from different
/// signals.
pub const MATCH_TOLERANCE: f64 = 1e-7;

/// Source of minimal lengths beyond a table's scanned range.
pub trait LengthOracle: Send + Sync {
    fn rank(&self) -> usize;
    /// `None` when no closed walk has class `h`.
    fn length(&self, h: &HomologyClass) -> Result<Option<Real>>;
    /// Every nonzero class with minimal length at most `l_max`.
    fn classes_within(&self, l_max: &Real) -> Result<Vec<(HomologyClass, Real)>>;
}

impl LengthOracle for LengthTable {
    fn rank(&self) -> usize {
        LengthTable::rank(self)
    }

    fn length(&self, h: &HomologyClass) -> Result<Option<Real>> {
        LengthTable::length(self, h)
    }

    fn classes_within(&self, l_max: &Real) -> Result<Vec<(HomologyClass, Real)>> {
        Ok(all_minimal_lengths(self.graph(), self.basis(), l_max)?.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyRow {
    /// Coordinates in the table basis, signed so that `Ψ > 0`.
    pub coords: HomologyClass,
    pub frequency: f64,
    /// First-appearance (minimal orbit) length.
    pub length: Real,
}

/// What a table knows about one class.
#[derive(Clone, Debug, PartialEq)]
pub enum Lookup {
    Known(Real),
    /// No closed walk has this class.
    Absent,
}

impl Lookup {
    pub fn known(self) -> Option<Real> {
        match self {
            Lookup::Known(l) => Some(l),
            Lookup::Absent => None,
        }
    }
}

#[derive(Clone)]
pub struct FrequencyTable {
    /// Fluxes of the generating ray on the graph's own cycle basis, when
    /// known.
    pub ray: Vec<f64>,
    rank: usize,
    basis: Vec<f64>,
    rows: Vec<FrequencyRow>,
    index: HashMap<HomologyClass, usize>,
    l_max: Real,
    /// Set after a component split.
    pub component: Option<usize>,
    pub non_generic: bool,
    oracle: Option<Arc<dyn LengthOracle>>,
    /// Oracle class of each table basis element.
    basis_classes: Vec<HomologyClass>,
}

impl std::fmt::Debug for FrequencyTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrequencyTable")
            .field("rank", &self.rank)
            .field("basis", &self.basis)
            .field("rows", &self.rows.len())
            .field("l_max", &self.l_max)
            .field("oracle", &self.oracle.is_some())
            .finish()
    }
}

impl FrequencyTable {
    /// Builds a table from explicit rows. Rows are re-signed to positive
    /// flux and sorted by length.
    pub fn from_rows(basis: Vec<f64>, rows: Vec<FrequencyRow>, l_max: Real) -> Result<FrequencyTable> {
        let rank = basis.len();
        let mut clean: Vec<FrequencyRow> = Vec::with_capacity(rows.len());
        for mut r in rows {
            if r.coords.rank() != rank {
                return Err(Error::WrongRank { expected: rank, got: r.coords.rank() });
            }
            if r.coords.is_zero() {
                return Err(Error::TrivialClass);
            }
            if psi(&basis, &r.coords) < 0.0 {
                r.coords = -r.coords;
            }
            clean.push(r);
        }
        clean.sort_by(|a, b| a.length.total_cmp(&b.length).then(a.frequency.total_cmp(&b.frequency)));
        let mut index = HashMap::with_capacity(clean.len());
        for (i, r) in clean.iter().enumerate() {
            if index.insert(r.coords.clone(), i).is_some() {
                return Err(Error::Inconsistent(format!("class {} listed twice", r.coords)));
            }
        }
        Ok(FrequencyTable {
            ray: Vec::new(),
            rank,
            basis,
            rows: clean,
            index,
            l_max,
            component: None,
            non_generic: false,
            oracle: None,
            basis_classes: Vec::new(),
        })
    }

    /// Every class with `l(h) <= l_max` straight from the length oracle,
    /// in the coordinates of the graph's spanning-forest basis.
    pub fn from_oracle(oracle: Arc<LengthTable>, ray: &FluxRay, l_max: &Real) -> Result<FrequencyTable> {
        let rank = oracle.rank();
        if ray.rank() != rank {
            return Err(Error::WrongRank { expected: rank, got: ray.rank() });
        }
        let all = all_minimal_lengths(oracle.graph(), oracle.basis(), l_max)?;
        let mut rows = Vec::new();
        for (h, length) in all {
            let mu = ray.psi(&h);
            if mu > 0.0 {
                rows.push(FrequencyRow { coords: h, frequency: mu, length });
            }
        }
        let mut t = FrequencyTable::from_rows(ray.fluxes.clone(), rows, l_max.clone())?;
        t.ray = ray.fluxes.clone();
        t.basis_classes = (0..rank).map(|i| HomologyClass::unit(rank, i)).collect();
        t.oracle = Some(oracle);
        Ok(t)
    }

    /// Oracle table of a graph along the square-root-of-primes ray.
    pub fn oracle_for(g: &MetricGraph, l_max: &Real) -> Result<FrequencyTable> {
        let lt = Arc::new(LengthTable::new(g.clone()));
        let ray = FluxRay::sqrt_primes(lt.rank());
        FrequencyTable::from_oracle(lt, &ray, l_max)
    }

    /// Spectral-mode table: enumerate orbits up to `l_max`, form the
    /// coefficient signals along `ray` and scan them.
    pub fn from_signals(g: &MetricGraph, ray: &FluxRay, l_max: &Real, method: Method) -> Result<FrequencyTable> {
        let basis = crate::graph::forest_cycle_basis(g);
        let orbits = enumerate_orbits(g, l_max, ORBIT_CAP)?;
        let signals = coefficient_signals(g, &basis, &orbits, ray);
        let mut t = scan_lengths(&signals, l_max, method, Some(basis.rank()))?;
        t.ray = ray.fluxes.clone();
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    pub fn rows(&self) -> &[FrequencyRow] {
        &self.rows
    }

    pub fn l_max(&self) -> &Real {
        &self.l_max
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.is_some()
    }

    pub fn basis_classes(&self) -> &[HomologyClass] {
        &self.basis_classes
    }

    /// `|Σ c_i μ_i|`.
    pub fn frequency(&self, coords: &HomologyClass) -> f64 {
        psi(&self.basis, coords).abs()
    }

    pub fn row(&self, coords: &HomologyClass) -> Option<&FrequencyRow> {
        self.index.get(coords).or_else(|| self.index.get(&-coords)).map(|&i| &self.rows[i])
    }

    /// The observed row whose frequency matches `mu`.
    pub fn row_for_frequency(&self, mu: f64) -> Option<&FrequencyRow> {
        self.rows.iter().find(|r| (r.frequency - mu).abs() <= MATCH_TOLERANCE * mu.max(1.0))
    }

    /// `ℓ*(h)`: from the table within its range, from the oracle beyond.
    pub fn lookup(&self, coords: &HomologyClass) -> Result<Lookup> {
        if coords.rank() != self.rank {
            return Err(Error::WrongRank { expected: self.rank, got: coords.rank() });
        }
        if coords.is_zero() {
            return Err(Error::TrivialClass);
        }
        if let Some(r) = self.row(coords) {
            return Ok(Lookup::Known(r.length.clone()));
        }
        match &self.oracle {
            Some(o) => {
                let h = self.oracle_class(coords);
                Ok(match o.length(&h)? {
                    Some(l) => Lookup::Known(l),
                    None => Lookup::Absent,
                })
            }
            None => Err(Error::Incomplete { needed: format!("class {coords}"), covered: self.l_max.to_string() }),
        }
    }

    /// `ℓ*(h)`, treating a class without closed walks as an error.
    pub fn length(&self, coords: &HomologyClass) -> Result<Real> {
        match self.lookup(coords)? {
            Lookup::Known(l) => Ok(l),
            Lookup::Absent => Err(Error::NoClosedWalk(coords.to_string())),
        }
    }

    /// `ℓ*(h)` if it is at most the table's range, without consulting the
    /// oracle.
    pub fn length_within(&self, coords: &HomologyClass) -> Option<Real> {
        self.row(coords).map(|r| r.length.clone())
    }

    fn oracle_class(&self, coords: &HomologyClass) -> HomologyClass {
        let n = self.basis_classes.first().map_or(0, |b| b.rank());
        let mut h = vec![0i64; n];
        for (c, b) in coords.coords().iter().zip(&self.basis_classes) {
            for (x, y) in h.iter_mut().zip(b.coords()) {
                *x += c * y;
            }
        }
        HomologyClass(h)
    }

    /// Re-expresses the table in a sublattice basis: `rows[i]` gives the
    /// new basis vectors in old coordinates, and `members` the rows kept.
    pub(crate) fn restricted(&self, new_basis: &[Vec<BigInt>], members: &[usize]) -> Result<FrequencyTable> {
        use num::ToPrimitive;
        let basis_i64: Vec<Vec<i64>> = new_basis
            .iter()
            .map(|r| r.iter().map(|v| v.to_i64().ok_or_else(|| Error::IntegerRelation("coefficient overflow".into()))).collect())
            .collect::<Result<_>>()?;
        let basis: Vec<f64> = basis_i64
            .iter()
            .map(|w| w.iter().zip(&self.basis).map(|(&c, m)| c as f64 * m).sum())
            .collect();
        let mut rows = Vec::with_capacity(members.len());
        for &i in members {
            let r = &self.rows[i];
            let x = crate::real::solve_in_span(&basis_i64, r.coords.coords())
                .filter(|x| x.iter().all(|q| q.is_integer()))
                .ok_or_else(|| Error::InconsistentPartition(format!("class {} outside its component lattice", r.coords)))?;
            let coords = x
                .iter()
                .map(|q| q.to_integer().to_i64().ok_or_else(|| Error::IntegerRelation("coefficient overflow".into())))
                .collect::<Result<Vec<i64>>>()?;
            rows.push(FrequencyRow { coords: HomologyClass(coords), frequency: r.frequency, length: r.length.clone() });
        }
        let mut t = FrequencyTable::from_rows(basis, rows, self.l_max.clone())?;
        t.ray = self.ray.clone();
        t.non_generic = self.non_generic;
        if self.oracle.is_some() {
            t.oracle = self.oracle.clone();
            t.basis_classes = basis_i64.iter().map(|w| self.oracle_class(&HomologyClass(w.clone()))).collect();
        }
        Ok(t)
    }

    /// Text interchange format: `#` header lines, then a tab-separated
    /// table of coordinates, frequency and length.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# frequency table\n");
        let _ = writeln!(s, "# rank {}", self.rank);
        let join = |v: &[f64]| v.iter().map(|x| format_f64(*x)).collect::<Vec<_>>().join(" ");
        if !self.ray.is_empty() {
            let _ = writeln!(s, "# ray {}", join(&self.ray));
        }
        let _ = writeln!(s, "# basis {}", join(&self.basis));
        let _ = writeln!(s, "# lmax {}", format_real(&self.l_max));
        if let Some(c) = self.component {
            let _ = writeln!(s, "# component {c}");
        }
        if self.non_generic {
            s.push_str("# non-generic\n");
        }
        s.push_str("coords\tfrequency\tlength\n");
        for r in &self.rows {
            let coords: Vec<String> = r.coords.coords().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{}\t{}\t{}", coords.join(","), format_f64(r.frequency), format_real(&r.length));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<FrequencyTable> {
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let floats = |line: usize, rest: &str| -> Result<Vec<f64>> {
            rest.split_whitespace()
                .map(|w| w.parse::<f64>().map_err(|e| perr(line, format!("{w}: {e}"))))
                .collect()
        };
        let mut rank = None;
        let mut ray = Vec::new();
        let mut basis = None;
        let mut l_max = None;
        let mut component = None;
        let mut non_generic = false;
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(meta) = t.strip_prefix('#') {
                let meta = meta.trim();
                let (key, rest) = meta.split_once(' ').unwrap_or((meta, ""));
                match key {
                    "rank" => rank = Some(rest.trim().parse::<usize>().map_err(|e| perr(line, e.to_string()))?),
                    "ray" => ray = floats(line, rest)?,
                    "basis" => basis = Some(floats(line, rest)?),
                    "lmax" => l_max = Some(Real::parse(rest, false).map_err(|e| perr(line, e.to_string()))?),
                    "component" => component = Some(rest.trim().parse::<usize>().map_err(|e| perr(line, e.to_string()))?),
                    "non-generic" => non_generic = true,
                    _ => {}
                }
                continue;
            }
            if !header_seen {
                if t.split('\t').next() != Some("coords") {
                    return Err(perr(line, "expected the column header".into()));
                }
                header_seen = true;
                continue;
            }
            let cols: Vec<&str> = t.split('\t').collect();
            if cols.len() != 3 {
                return Err(perr(line, format!("expected 3 columns, found {}", cols.len())));
            }
            let coords = if cols[0].is_empty() {
                Vec::new()
            } else {
                cols[0]
                    .split(',')
                    .map(|c| c.trim().parse::<i64>().map_err(|e| perr(line, format!("{c}: {e}"))))
                    .collect::<Result<Vec<i64>>>()?
            };
            let frequency = cols[1].parse::<f64>().map_err(|e| perr(line, e.to_string()))?;
            let length = Real::parse(cols[2], false).map_err(|e| perr(line, e.to_string()))?;
            rows.push(FrequencyRow { coords: HomologyClass(coords), frequency, length });
        }
        let basis = basis.ok_or_else(|| perr(0, "missing basis line".into()))?;
        if let Some(r) = rank {
            if r != basis.len() {
                return Err(Error::WrongRank { expected: r, got: basis.len() });
            }
        }
        let l_max = l_max.ok_or_else(|| perr(0, "missing lmax line".into()))?;
        let mut t = FrequencyTable::from_rows(basis, rows, l_max)?;
        t.ray = ray;
        t.component = component;
        t.non_generic = non_generic;
        Ok(t)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<FrequencyTable> {
        FrequencyTable::from_text(&std::fs::read_to_string(path)?)
    }

    /// The same table with rows up to `l_max`, refilled from the oracle.
    /// Without an oracle only a shrinking request succeeds.
    pub fn extend_to(&self, l_max: &Real) -> Result<FrequencyTable> {
        if l_max.le_tol(&self.l_max) {
            return Ok(self.clone());
        }
        let Some(oracle) = &self.oracle else {
            return Err(Error::Incomplete { needed: l_max.to_string(), covered: self.l_max.to_string() });
        };
        let span: Vec<Vec<i64>> = self.basis_classes.iter().map(|b| b.coords().to_vec()).collect();
        let mut rows = Vec::new();
        for (h, length) in oracle.classes_within(l_max)? {
            let Some(x) = crate::real::solve_in_span(&span, h.coords()) else { continue };
            if !x.iter().all(|q| q.is_integer()) {
                continue;
            }
            let coords: Option<Vec<i64>> = x.iter().map(|q| num::ToPrimitive::to_i64(&q.to_integer())).collect();
            let Some(coords) = coords else { continue };
            let coords = HomologyClass(coords);
            let f = psi(&self.basis, &coords);
            if f > 0.0 {
                rows.push(FrequencyRow { coords, frequency: f, length });
            }
        }
        let mut t = FrequencyTable::from_rows(self.basis.clone(), rows, l_max.clone())?;
        t.ray = self.ray.clone();
        t.component = self.component;
        t.non_generic = self.non_generic;
        t.oracle = self.oracle.clone();
        t.basis_classes = self.basis_classes.clone();
        Ok(t)
    }

    /// Drops the oracle, leaving only the scanned rows.
    pub fn without_oracle(mut self) -> FrequencyTable {
        self.oracle = None;
        self.basis_classes.clear();
        self
    }
}

fn psi(basis: &[f64], coords: &HomologyClass) -> f64 {
    coords.coords().iter().zip(basis).map(|(&c, m)| c as f64 * m).sum()
}

/// Recovers the frequencies of each signal in order of increasing length
/// and records where each first appears.
pub fn scan_lengths(
    signals: &[CoefficientSignal],
    l_max: &Real,
    method: Method,
    expected_rank: Option<usize>,
) -> Result<FrequencyTable> {
    let mut ordered: Vec<&CoefficientSignal> = signals.iter().filter(|s| s.length.le_tol(l_max)).collect();
    ordered.sort_by(|a, b| a.length.total_cmp(&b.length));
    let recovered = recover_all(&ordered, method)?;
    let mut seen: Vec<(f64, Real)> = Vec::new();
    for (s, params) in ordered.iter().zip(recovered) {
        for term in params.terms {
            if term.nu == 0.0 {
                continue;
            }
            let mu = term.mu;
            if !seen.iter().any(|(m, _)| (m - mu).abs() <= MATCH_TOLERANCE * mu.max(1.0)) {
                seen.push((mu, s.length.clone()));
            }
        }
    }
    if seen.is_empty() {
        return FrequencyTable::from_rows(Vec::new(), Vec::new(), l_max.clone());
    }
    let freqs: Vec<f64> = seen.iter().map(|(m, _)| *m).collect();
    let gb = group_basis(&freqs, expected_rank, 1e-9)?;
    let rows = seen
        .into_iter()
        .zip(gb.coords)
        .map(|((frequency, length), c)| FrequencyRow { coords: HomologyClass(c), frequency, length })
        .collect();
    let mut t = FrequencyTable::from_rows(gb.basis, rows, l_max.clone())?;
    t.non_generic = gb.non_generic;
    Ok(t)
}

fn recover_all(signals: &[&CoefficientSignal], method: Method) -> Result<Vec<CosineParams>> {
    let workers = crate::spectrum::worker_count().min(signals.len().max(1));
    let chunk = signals.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<CosineParams>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = signals
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|s| {
                            recover_cosine_params(*s, method).map_err(|e| {
                                Error::Stage { stage: "cosine recovery", source: Box::new(e) }
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("recovery worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(signals.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    fn class(v: &[i64]) -> HomologyClass {
        HomologyClass(v.to_vec())
    }

    #[test]
    fn figure_eight_oracle_table() {
        let g = fixtures::figure_eight(2, 3);
        let lt = Arc::new(LengthTable::new(g));
        let ray = FluxRay::from_f64(vec![1.0, 2f64.sqrt()]);
        let t = FrequencyTable::from_oracle(lt, &ray, &Real::int(6)).unwrap();
        let got: Vec<(f64, Real)> = t.rows().iter().map(|r| (r.frequency, r.length.clone())).collect();
        let r2 = 2f64.sqrt();
        let want = [(1.0, 2), (r2, 3), (2.0, 4), (r2 - 1.0, 5), (1.0 + r2, 5), (3.0, 6), (2.0 * r2, 6)];
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (mu, l) in want {
            let row = t.row_for_frequency(mu).unwrap();
            assert_eq!(row.length, Real::int(l));
        }
        assert_eq!(t.length(&class(&[3, 3])).unwrap(), Real::int(15));
        let wider = t.extend_to(&Real::int(9)).unwrap();
        assert_eq!(wider.row(&class(&[3, 1])).unwrap().length, Real::int(9));
        assert_eq!(wider.rows().len(), t.rows().len() + 8);
        assert!(t.clone().without_oracle().extend_to(&Real::int(9)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = fixtures::theta(&[1, 2, 3]);
        let t = FrequencyTable::oracle_for(&g, &Real::int(8)).unwrap();
        let back = FrequencyTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back.rows(), t.rows());
        assert_eq!(back.basis(), t.basis());
        assert_eq!(back.l_max(), t.l_max());
        assert!(matches!(back.lookup(&class(&[5, 5])), Err(Error::Incomplete { .. })));
    }

    #[test]
    fn scan_matches_oracle_on_theta() {
        let g = fixtures::theta(&[1, 2, 3]);
        let ray = FluxRay::sqrt_primes(2);
        let l = Real::int(8);
        let spectral = FrequencyTable::from_signals(&g, &ray, &l, Method::Recurrence).unwrap();
        let oracle = FrequencyTable::oracle_for(&g, &l).unwrap();
        assert_eq!(spectral.rank(), 2);
        assert_eq!(spectral.rows().len(), oracle.rows().len());
        for r in oracle.rows() {
            let s = spectral.row_for_frequency(r.frequency).unwrap();
            assert!((s.frequency - r.frequency).abs() < 1e-8);
            assert_eq!(s.length, r.length);
        }
    }

    #[test]
    fn tree_gives_empty_table() {
        let g = fixtures::star(&[1, 2, 3]);
        let t = FrequencyTable::from_signals(&g, &FluxRay::from_f64(vec![]), &Real::int(8), Method::Recurrence).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.rank(), 0);
    }

    #[test]
    fn k4_spectral_and_derivative_modes() {
        let g = fixtures::k4_unit();
        let l = Real::int(8);
        let oracle = FrequencyTable::oracle_for(&g, &l).unwrap();
        let spectral = FrequencyTable::from_signals(&g, &FluxRay::sqrt_primes(3), &l, Method::Recurrence).unwrap();
        assert_eq!(spectral.rank(), 3);
        assert!(!spectral.non_generic);
        assert_eq!(spectral.rows().len(), oracle.rows().len());
        for r in oracle.rows() {
            assert_eq!(spectral.row_for_frequency(r.frequency).unwrap().length, r.length);
        }
        let q = |n: i64, d: i64| num::BigRational::new(n.into(), d.into());
        let ray = FluxRay::from_rationals(vec![q(7, 10), q(11, 10), q(13, 10)]);
        let exact = FrequencyTable::from_signals(&g, &ray, &Real::int(6), Method::Derivative).unwrap();
        assert!(exact.non_generic);
    }
}
