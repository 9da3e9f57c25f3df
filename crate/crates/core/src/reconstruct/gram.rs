//! The Albanese torus as a Gram matrix of cycle generators, and what it
//! says about overlaps and spanning trees.

use std::fmt;

use crate::error::{Error, Result};
use crate::frequency::{FrequencyTable, Lookup};
use crate::homology::HomologyClass;
use crate::real::{determinant, Real};

/// Gram matrix of the lattice vectors `v_i` with `|v_i|² = l(γ_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlbaneseGram {
    /// Oriented generators in table coordinates.
    pub basis: Vec<HomologyClass>,
    pub matrix: Vec<Vec<Real>>,
}

impl AlbaneseGram {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn determinant(&self) -> Real {
        if self.matrix.is_empty() {
            return Real::one();
        }
        determinant(&self.matrix)
    }

    /// All leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.rank()).all(|k| {
            let minor: Vec<Vec<Real>> = self.matrix[..k].iter().map(|r| r[..k].to_vec()).collect();
            let d = determinant(&minor);
            d.signum() > 0 && !d.approx_eq(&Real::zero())
        })
    }
}

impl fmt::Display for AlbaneseGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn optional(table: &FrequencyTable, c: &HomologyClass) -> Result<Option<Real>> {
    Ok(match table.lookup(c)? {
        Lookup::Known(l) => Some(l),
        Lookup::Absent => None,
    })
}

/// `|v_i|² = l(γ_i)` and `2⟨v_i, v_j⟩ = l(γ_i + γ_j) - l(γ_i - γ_j)`.
pub fn albanese_gram(table: &FrequencyTable, basis: &[HomologyClass]) -> Result<AlbaneseGram> {
    let n = basis.len();
    let mut matrix = vec![vec![Real::zero(); n]; n];
    for i in 0..n {
        matrix[i][i] = table.length(&basis[i])?;
        for j in 0..i {
            let plus = optional(table, &(&basis[i] + &basis[j]))?;
            let minus = optional(table, &(&basis[i] - &basis[j]))?;
            let v = match (plus, minus) {
                (Some(p), Some(m)) => (p - m).half(),
                (None, None) => Real::zero(),
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "{} ± {} realized with only one sign",
                        basis[i], basis[j]
                    )))
                }
            };
            matrix[i][j] = v.clone();
            matrix[j][i] = v;
        }
    }
    let gram = AlbaneseGram { basis: basis.to_vec(), matrix };
    if !gram.is_positive_definite() {
        return Err(Error::Inconsistent("Gram matrix is not positive definite".into()));
    }
    Ok(gram)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complexity {
    /// `det(Gram)`: the number of spanning trees for unit edge lengths.
    pub determinant: Real,
    /// `√vol = det^{1/4}`, the literal reading of the volume formula.
    pub root_volume: f64,
}

pub fn complexity(gram: &AlbaneseGram) -> Complexity {
    let d = gram.determinant();
    Complexity { root_volume: d.to_f64().max(0.0).powf(0.25), determinant: d }
}

/// Whether the cycles of `a` and `b`, as oriented, traverse some edge in
/// the same direction: `l(a - b) < l(a) + l(b)`.
pub fn positive_overlap(table: &FrequencyTable, a: &HomologyClass, b: &HomologyClass) -> Result<bool> {
    let sum = table.length(a)? + table.length(b)?;
    let diff = a - b;
    if diff.is_zero() {
        return Ok(true);
    }
    Ok(match optional(table, &diff)? {
        Some(l) => l.lt_tol(&sum),
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    fn class(v: &[i64]) -> HomologyClass {
        HomologyClass(v.to_vec())
    }

    fn ints(m: &[Vec<Real>]) -> Vec<Vec<i64>> {
        m.iter().map(|r| r.iter().map(|x| x.to_f64() as i64).collect()).collect()
    }

    #[test]
    fn theta_gram() {
        let t = FrequencyTable::oracle_for(&fixtures::theta(&[1, 2, 3]), &Real::int(8)).unwrap();
        // forest basis cycles: e1 - e0 (length 3) and e2 - e0 (length 4)
        let g = albanese_gram(&t, &[class(&[1, 0]), class(&[0, 1])]).unwrap();
        assert_eq!(ints(&g.matrix), vec![vec![3, 1], vec![1, 4]]);
        assert_eq!(complexity(&g).determinant, Real::int(11));
    }

    #[test]
    fn figure_eight_gram_is_diagonal() {
        let t = FrequencyTable::oracle_for(&fixtures::figure_eight(2, 3), &Real::int(6)).unwrap();
        let g = albanese_gram(&t, &[class(&[1, 0]), class(&[0, 1])]).unwrap();
        assert_eq!(ints(&g.matrix), vec![vec![2, 0], vec![0, 3]]);
        for s in [1, -1] {
            assert!(!positive_overlap(&t, &class(&[1, 0]), &class(&[0, s])).unwrap());
        }
    }

    #[test]
    fn theta_overlap_flips_with_orientation() {
        let t = FrequencyTable::oracle_for(&fixtures::theta(&[1, 2, 3]), &Real::int(8)).unwrap();
        // both basis cycles run along e0 backwards
        assert!(positive_overlap(&t, &class(&[1, 0]), &class(&[0, 1])).unwrap());
        assert!(!positive_overlap(&t, &class(&[1, 0]), &class(&[0, -1])).unwrap());
    }

    #[test]
    fn unit_theta_complexity() {
        let t = FrequencyTable::oracle_for(&fixtures::theta(&[1, 1, 1]), &Real::int(4)).unwrap();
        let g = albanese_gram(&t, &[class(&[1, 0]), class(&[0, 1])]).unwrap();
        let c = complexity(&g);
        assert_eq!(c.determinant, Real::int(3));
        assert!((c.root_volume - 3f64.powf(0.25)).abs() < 1e-12);
    }
}
