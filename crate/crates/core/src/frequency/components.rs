//! Splitting a table of a disconnected graph into one table per component.

use num::{BigInt, One, Signed, Zero};

use super::{FrequencyTable, Lookup};
use crate::error::{Error, Result};
use crate::homology::HomologyClass;
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct ComponentSplit {
    /// One table per component carrying cycles, ordered by the first row.
    pub tables: Vec<FrequencyTable>,
    /// Components with trivial first homology.
    pub tree_components: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Two frequencies share a component exactly when some combination of them
/// is again realized by a closed walk. Rows are joined when `r + s` or
/// `r - s` is observed (or, with an oracle, has a closed walk at all).
///
/// The per-component lattices must together generate the whole lattice.
/// With an oracle the range is doubled until they do; without one a short
/// table fails with [`Error::Incomplete`].
pub fn split_components(table: &FrequencyTable, zero_multiplicity: usize) -> Result<ComponentSplit> {
    let mut table = table.clone();
    for _ in 0..EXTENSION_ROUNDS {
        if let Some(split) = split_once(&table, zero_multiplicity)? {
            return Ok(split);
        }
        if !table.has_oracle() {
            break;
        }
        let next = if table.l_max().signum() > 0 { table.l_max().scale(2) } else { Real::int(1) };
        table = table.extend_to(&next)?;
    }
    Err(Error::Incomplete {
        needed: "rows generating the lattice".into(),
        covered: table.l_max().to_string(),
    })
}

const EXTENSION_ROUNDS: usize = 8;

fn split_once(table: &FrequencyTable, zero_multiplicity: usize) -> Result<Option<ComponentSplit>> {
    let rows = table.rows();
    let n = rows.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            let (a, b) = (&rows[i].coords, &rows[j].coords);
            let linked = [a + b, a - b].iter().any(|c| linked(table, c));
            if linked {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj] = ri;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_group: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let g = *root_group[r].get_or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    if groups.len() > zero_multiplicity {
        return Err(Error::InconsistentPartition(format!(
            "{} cycle-carrying components but only {} components in total",
            groups.len(),
            zero_multiplicity
        )));
    }
    let mut tables = Vec::with_capacity(groups.len());
    let mut total_rank = 0;
    let mut all_basis: Vec<Vec<BigInt>> = Vec::new();
    for (label, members) in groups.iter().enumerate() {
        let coords: Vec<Vec<BigInt>> = members
            .iter()
            .map(|&i| rows[i].coords.coords().iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        let mut basis = super::hermite_basis(&coords);
        // orient each basis vector to positive frequency
        for w in basis.iter_mut() {
            let f: f64 = w.iter().zip(table.basis()).map(|(c, m)| num::ToPrimitive::to_f64(c).unwrap_or(0.0) * m).sum();
            if f < 0.0 {
                for c in w.iter_mut() {
                    *c = -c.clone();
                }
            }
        }
        total_rank += basis.len();
        all_basis.extend(basis.iter().cloned());
        let mut t = table.restricted(&basis, members)?;
        t.component = Some(label);
        tables.push(t);
    }
    let combined = super::hermite_basis(&all_basis);
    if combined.len() != total_rank {
        return Err(Error::InconsistentPartition("component lattices overlap".into()));
    }
    if total_rank > table.rank() {
        return Err(Error::InconsistentPartition(format!("component ranks sum to {total_rank} > {}", table.rank())));
    }
    // a square echelon form with unit pivots spans the whole lattice
    let spans = total_rank == table.rank()
        && combined.iter().all(|r| r.iter().find(|c| !c.is_zero()).is_some_and(|c| c.abs().is_one()));
    if !spans {
        return Ok(None);
    }
    Ok(Some(ComponentSplit { tree_components: zero_multiplicity - tables.len(), tables }))
}

fn linked(table: &FrequencyTable, c: &HomologyClass) -> bool {
    if c.is_zero() {
        return false;
    }
    if table.row(c).is_some() {
        return true;
    }
    table.has_oracle() && matches!(table.lookup(c), Ok(Lookup::Known(_)))
}
