//! Recognizing which frequencies belong to cycles, and searching for bases
//! of the frequency lattice made of cycles.

use num::{One, Signed};

use crate::error::{Error, Result};
use crate::frequency::{FrequencyTable, Lookup};
use crate::homology::HomologyClass;
use crate::real::{integer_determinant, Real};

fn require_covered(table: &FrequencyTable, l: &Real) -> Result<()> {
    if l.le_tol(table.l_max()) {
        Ok(())
    } else {
        Err(Error::Incomplete { needed: l.to_string(), covered: table.l_max().to_string() })
    }
}

/// A splitting `c = κ + κ'` of a class into two nonzero classes, with
/// `l(κ) + l(κ') <= l(c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub first: HomologyClass,
    pub second: HomologyClass,
    /// `l(κ) + l(κ')`.
    pub total: Real,
}

/// All decompositions of `c` whose parts are observed rows, shortest total
/// first, then by coordinates.
pub fn decompositions(table: &FrequencyTable, c: &HomologyClass) -> Result<Vec<Decomposition>> {
    let l = table.length(c)?;
    require_covered(table, &l)?;
    let mut out = Vec::new();
    for r in table.rows() {
        if !r.length.lt_tol(&l) {
            break;
        }
        for k in [r.coords.clone(), -&r.coords] {
            let rest = c - &k;
            if rest.is_zero() {
                continue;
            }
            let Some(l2) = table.length_within(&rest) else { continue };
            let total = &r.length + &l2;
            if total.le_tol(&l) {
                out.push(Decomposition { first: k, second: rest, total });
            }
        }
    }
    out.sort_by(|a, b| a.total.cmp_tol(&b.total).then_with(|| a.first.cmp(&b.first)));
    Ok(out)
}

/// Whether the minimal orbit of class `c` is a cycle: no decomposition
/// `c = κ ± κ'` with `l(κ) + l(κ') <= l(c)` exists.
pub fn is_cycle_class(table: &FrequencyTable, c: &HomologyClass) -> Result<bool> {
    let l = table.length(c)?;
    require_covered(table, &l)?;
    for r in table.rows() {
        if !r.length.lt_tol(&l) {
            break;
        }
        for k in [&r.coords + c, c - &r.coords] {
            if k.is_zero() {
                continue;
            }
            if let Some(l2) = table.length_within(&k) {
                if (&r.length + &l2).le_tol(&l) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// [`is_cycle_class`] for the observed frequency `mu`.
pub fn is_cycle_frequency(table: &FrequencyTable, mu: f64) -> Result<bool> {
    let row = table
        .row_for_frequency(mu)
        .ok_or_else(|| Error::Inconsistent(format!("frequency {mu} is not in the table")))?;
    is_cycle_class(table, &row.coords.clone())
}

/// Observed cycle classes up to `cap`, shortest first.
pub fn cycle_candidates(table: &FrequencyTable, cap: &Real) -> Result<Vec<(HomologyClass, Real)>> {
    require_covered(table, cap)?;
    let mut out = Vec::new();
    for r in table.rows() {
        if !r.length.le_tol(cap) {
            break;
        }
        if is_cycle_class(table, &r.coords)? {
            out.push((r.coords.clone(), r.length.clone()));
        }
    }
    Ok(out)
}

/// Length cap for generator searches: twice the `n`-th smallest cycle
/// length, raised if needed until the cycles below it span the lattice.
/// Fails with [`Error::Incomplete`] when the table is too short to decide.
pub fn generator_cap(table: &FrequencyTable) -> Result<Real> {
    let n = table.rank();
    if n == 0 {
        return Ok(Real::zero());
    }
    let mut cycles: Vec<Vec<i64>> = Vec::new();
    let mut nth: Option<Real> = None;
    let mut spanning: Option<Real> = None;
    for r in table.rows() {
        if nth.is_some() && spanning.is_some() {
            break;
        }
        if !is_cycle_class(table, &r.coords)? {
            continue;
        }
        cycles.push(r.coords.coords().to_vec());
        if cycles.len() == n {
            nth = Some(r.length.scale(2));
        }
        if spanning.is_none() && crate::real::integer_rank(&cycles) == n {
            spanning = Some(r.length.clone());
        }
    }
    match (nth, spanning) {
        (Some(a), Some(b)) => {
            let cap = a.max(b);
            require_covered(table, &cap)?;
            Ok(cap)
        }
        _ => Err(Error::Incomplete {
            needed: "enough cycles to span the lattice".into(),
            covered: table.l_max().to_string(),
        }),
    }
}

/// The table extended (through its oracle) far enough for
/// [`generator_cap`] to succeed.
pub fn prepare_table(table: &FrequencyTable) -> Result<(FrequencyTable, Real)> {
    let mut t = table.clone();
    for _ in 0..8 {
        match generator_cap(&t) {
            Ok(cap) => return Ok((t, cap)),
            Err(Error::Incomplete { .. }) if t.has_oracle() => {
                let cap_guess = match generator_cap_hint(&t) {
                    Some(c) if !c.le_tol(t.l_max()) => c,
                    _ => t.l_max().scale(2).max(Real::one()),
                };
                t = t.extend_to(&cap_guess)?;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Incomplete { needed: "a spanning set of cycles".into(), covered: t.l_max().to_string() })
}

fn generator_cap_hint(t: &FrequencyTable) -> Option<Real> {
    let n = t.rank();
    let mut count = 0;
    for r in t.rows() {
        if is_cycle_class(t, &r.coords).ok()? {
            count += 1;
            if count == n {
                return Some(r.length.scale(2));
            }
        }
    }
    None
}

/// Incremental rank test over small integer vectors.
#[derive(Clone, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<f64>)>,
}

impl Echelon {
    fn try_push(&self, v: &[i64]) -> Option<Echelon> {
        let mut x: Vec<f64> = v.iter().map(|&c| c as f64).collect();
        for (p, r) in &self.rows {
            if x[*p] != 0.0 {
                let f = x[*p] / r[*p];
                for (a, b) in x.iter_mut().zip(r) {
                    *a -= f * b;
                }
            }
        }
        let scale = v.iter().map(|c| c.abs()).max().unwrap_or(0) as f64;
        let p = (0..x.len()).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))?;
        if x[p].abs() <= 1e-9 * scale.max(1.0) {
            return None;
        }
        let mut next = self.clone();
        next.rows.push((p, x));
        Some(next)
    }
}

fn unimodular(classes: &[&HomologyClass]) -> bool {
    let rows: Vec<Vec<i64>> = classes.iter().map(|c| c.coords().to_vec()).collect();
    integer_determinant(&rows).abs().is_one()
}

/// Sets of `n` cycle classes forming a basis of the lattice, in
/// lexicographic order of candidate index. At most `limit` sets.
pub fn cycle_generator_sets(
    table: &FrequencyTable,
    cap: &Real,
    limit: usize,
) -> Result<Vec<Vec<HomologyClass>>> {
    let cands = cycle_candidates(table, cap)?;
    let n = table.rank();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    let mut chosen: Vec<usize> = Vec::new();
    fn walk(
        cands: &[(HomologyClass, Real)],
        n: usize,
        from: usize,
        ech: &Echelon,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<HomologyClass>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if chosen.len() == n {
            let set: Vec<&HomologyClass> = chosen.iter().map(|&i| &cands[i].0).collect();
            if unimodular(&set) {
                out.push(set.into_iter().cloned().collect());
            }
            return;
        }
        for i in from..cands.len() {
            if cands.len() - i < n - chosen.len() {
                break;
            }
            if let Some(next) = ech.try_push(cands[i].0.coords()) {
                chosen.push(i);
                walk(cands, n, i + 1, &next, chosen, out, limit);
                chosen.pop();
            }
        }
    }
    walk(&cands, n, 0, &Echelon::default(), &mut chosen, &mut out, limit);
    Ok(out)
}

/// How two cycles may be oriented without positive overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pairing {
    Free,
    /// Only with equal signs.
    Same,
    /// Only with opposite signs.
    Opposite,
    Never,
}

fn pairing(table: &FrequencyTable, a: &HomologyClass, la: &Real, b: &HomologyClass, lb: &Real) -> Result<Pairing> {
    let sum = la + lb;
    let below = |c: &HomologyClass| -> Result<bool> {
        if sum.le_tol(table.l_max()) {
            return Ok(table.length_within(c).is_some_and(|l| l.lt_tol(&sum)));
        }
        Ok(match table.lookup(c)? {
            Lookup::Known(l) => l.lt_tol(&sum),
            Lookup::Absent => false,
        })
    };
    // γa - γb shorter: positive overlap when oriented alike
    let pos_alike = below(&(a - b))?;
    let pos_opposite = below(&(a + b))?;
    Ok(match (pos_alike, pos_opposite) {
        (false, false) => Pairing::Free,
        (true, false) => Pairing::Opposite,
        (false, true) => Pairing::Same,
        (true, true) => Pairing::Never,
    })
}

/// A basis of oriented cycles with no two sharing an edge in the same
/// direction, if one exists among the candidates up to `cap`.
pub fn non_positive_basis(table: &FrequencyTable, cap: &Real) -> Result<Option<Vec<HomologyClass>>> {
    let n = table.rank();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    // pair sums stay below twice the cap, so rows answer every pairing
    let wider;
    let table = if table.has_oracle() {
        wider = table.extend_to(&cap.scale(2))?;
        &wider
    } else {
        table
    };
    let cands = cycle_candidates(table, cap)?;
    let m = cands.len();
    let mut pairs = vec![vec![Pairing::Free; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let p = pairing(table, &cands[i].0, &cands[i].1, &cands[j].0, &cands[j].1)?;
            pairs[i][j] = p;
            pairs[j][i] = p;
        }
    }
    struct Search<'a> {
        cands: &'a [(HomologyClass, Real)],
        pairs: &'a [Vec<Pairing>],
        n: usize,
        chosen: Vec<(usize, i64)>,
        nodes: u64,
    }
    impl Search<'_> {
        fn allowed(&self, k: usize, sign: i64) -> bool {
            self.chosen.iter().all(|&(i, s)| match self.pairs[i][k] {
                Pairing::Free => true,
                Pairing::Same => s == sign,
                Pairing::Opposite => s != sign,
                Pairing::Never => false,
            })
        }

        fn run(&mut self, from: usize, ech: &Echelon) -> Option<Vec<HomologyClass>> {
            self.nodes += 1;
            if self.chosen.len() == self.n {
                let set: Vec<HomologyClass> =
                    self.chosen.iter().map(|&(i, s)| self.cands[i].0.scale(s)).collect();
                let refs: Vec<&HomologyClass> = set.iter().collect();
                return unimodular(&refs).then_some(set);
            }
            for k in from..self.cands.len() {
                if self.cands.len() - k < self.n - self.chosen.len() {
                    break;
                }
                if self.pairs[k].iter().enumerate().any(|(i, p)| *p == Pairing::Never && self.chosen.iter().any(|c| c.0 == i)) {
                    continue;
                }
                let Some(next) = ech.try_push(self.cands[k].0.coords()) else { continue };
                let signs: &[i64] = if self.chosen.is_empty() { &[1] } else { &[1, -1] };
                for &s in signs {
                    if self.allowed(k, s) {
                        self.chosen.push((k, s));
                        if let Some(found) = self.run(k + 1, &next) {
                            return Some(found);
                        }
                        self.chosen.pop();
                    }
                }
            }
            None
        }
    }
    let mut search = Search { cands: &cands, pairs: &pairs, n, chosen: Vec::new(), nodes: 0 };
    Ok(search.run(0, &Echelon::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    fn table(g: &crate::MetricGraph, l: i64) -> FrequencyTable {
        FrequencyTable::oracle_for(g, &Real::int(l)).unwrap()
    }

    fn class(v: &[i64]) -> HomologyClass {
        HomologyClass(v.to_vec())
    }

    #[test]
    fn figure_eight_sum_is_not_a_cycle() {
        let t = table(&fixtures::figure_eight(2, 3), 10);
        assert!(is_cycle_class(&t, &class(&[1, 0])).unwrap());
        assert!(is_cycle_class(&t, &class(&[0, 1])).unwrap());
        assert!(!is_cycle_class(&t, &class(&[1, 1])).unwrap());
        assert!(!is_cycle_class(&t, &class(&[1, -1])).unwrap());
        let cap = generator_cap(&t).unwrap();
        let sets = cycle_generator_sets(&t, &cap, usize::MAX).unwrap();
        assert_eq!(sets, vec![vec![class(&[1, 0]), class(&[0, 1])]]);
    }

    #[test]
    fn theta_has_three_generator_sets() {
        let t = table(&fixtures::theta(&[1, 2, 3]), 14);
        let cap = generator_cap(&t).unwrap();
        let cands = cycle_candidates(&t, &cap).unwrap();
        assert_eq!(cands.len(), 3);
        assert_eq!(cycle_generator_sets(&t, &cap, usize::MAX).unwrap().len(), 3);
    }

    #[test]
    fn k4_cycles_match_enumeration() {
        let g = fixtures::k4_unit();
        let (t, cap) = prepare_table(&table(&g, 3)).unwrap();
        let cands = cycle_candidates(&t, &cap).unwrap();
        assert_eq!(cands.len(), crate::graph::enumerate_cycles(&g).len());
        assert!(non_positive_basis(&t, &cap).unwrap().is_some());
    }
}
