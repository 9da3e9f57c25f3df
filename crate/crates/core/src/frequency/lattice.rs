//! Integer structure of a set of frequencies: relation finding by LLL and
//! lattice bases by Hermite normal form.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest coefficient accepted in an integer relation.
pub const RELATION_BOUND: i64 = 64;

/// LLL reduction (δ = 3/4) of the rows of `b`, in floating point.
pub fn lll_reduce(b: &mut [Vec<f64>]) {
    let n = b.len();
    if n == 0 {
        return;
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, c)| a * c).sum::<f64>();
    let gram_schmidt = |b: &[Vec<f64>]| {
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                let denom = dot(&star[j], &star[j]);
                mu[i][j] = if denom > 0.0 { dot(&b[i], &star[j]) / denom } else { 0.0 };
                for (x, s) in v.iter_mut().zip(&star[j]) {
                    *x -= mu[i][j] * s;
                }
            }
            star.push(v);
        }
        (star, mu)
    };
    let (mut star, mut mu) = gram_schmidt(b);
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                for l in 0..=j {
                    mu[k][l] -= q * if l == j { 1.0 } else { mu[j][l] };
                }
            }
        }
        let lhs = dot(&star[k], &star[k]);
        let rhs = (0.75 - mu[k][k - 1] * mu[k][k - 1]) * dot(&star[k - 1], &star[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (star, mu) = gram_schmidt(b);
            k = (k - 1).max(1);
        }
    }
}

/// A small integer vector `c` with `|Σ c_i x_i| <= tol * max|x|`, if one
/// exists within [`RELATION_BOUND`].
pub fn integer_relation(x: &[f64], tol: f64) -> Option<Vec<i64>> {
    let n = x.len();
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Some(vec![1; n.min(1)]);
    }
    let weight = 1.0 / (tol * scale);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n + 1];
            r[i] = 1.0;
            r[n] = weight * x[i];
            r
        })
        .collect();
    lll_reduce(&mut rows);
    rows.iter()
        .filter_map(|r| {
            let c: Vec<i64> = r[..n].iter().map(|v| v.round() as i64).collect();
            if c.iter().all(|&v| v == 0) || c.iter().any(|v| v.abs() > RELATION_BOUND) {
                return None;
            }
            let residual: f64 = c.iter().zip(x).map(|(&a, v)| a as f64 * v).sum();
            (residual.abs() <= tol * scale * c.iter().map(|v| v.abs()).sum::<i64>() as f64).then_some(c)
        })
        .min_by_key(|c| c.iter().map(|v| v.abs()).sum::<i64>())
}

/// Row-style Hermite normal form basis of the lattice spanned by the
/// integer rows; zero rows dropped.
pub fn hermite_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        // Euclid on column c among rows r..
        loop {
            let pivot = (r..a.len()).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pr = a[r].clone();
            for i in 0..r {
                let q = a[i][c].div_floor(&pr[c]);
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// Result of [`group_basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct GroupBasis {
    pub rank: usize,
    /// Basis elements as real numbers; each is an integer combination of
    /// the inputs.
    pub basis: Vec<f64>,
    /// Per input frequency, integer coordinates with `x = Σ c_i basis_i`.
    pub coords: Vec<Vec<i64>>,
    /// Set when the rank falls short of the expected rank.
    pub non_generic: bool,
}

/// A basis of the subgroup of `R` generated by `frequencies`, with integer
/// coordinates for each input.
pub fn group_basis(frequencies: &[f64], expected_rank: Option<usize>, tol: f64) -> Result<GroupBasis> {
    if frequencies.is_empty() {
        return Ok(GroupBasis { rank: 0, basis: Vec::new(), coords: Vec::new(), non_generic: expected_rank.is_some_and(|r| r > 0) });
    }
    // rationally independent subset, processed smallest first
    let mut order: Vec<usize> = (0..frequencies.len()).collect();
    order.sort_by(|&a, &b| frequencies[a].total_cmp(&frequencies[b]));
    let mut independent: Vec<usize> = Vec::new();
    let mut rational: Vec<Option<Vec<BigRational>>> = vec![None; frequencies.len()];
    for &i in &order {
        let mut x: Vec<f64> = independent.iter().map(|&j| frequencies[j]).collect();
        x.push(frequencies[i]);
        match integer_relation(&x, tol) {
            Some(c) if c[independent.len()] != 0 => {
                let c0 = BigRational::from_integer(c[independent.len()].into());
                rational[i] = Some(c[..independent.len()].iter().map(|&v| -BigRational::from_integer(v.into()) / &c0).collect());
            }
            Some(_) => {
                return Err(Error::IntegerRelation(format!(
                    "relation among supposedly independent frequencies near {}",
                    frequencies[i]
                )))
            }
            None => {
                for r in rational.iter_mut().flatten() {
                    r.push(BigRational::zero());
                }
                let mut unit = vec![BigRational::zero(); independent.len() + 1];
                unit[independent.len()] = BigRational::one();
                independent.push(i);
                rational[i] = Some(unit);
            }
        }
    }
    let n = independent.len();
    let rational: Vec<Vec<BigRational>> = rational
        .into_iter()
        .map(|r| {
            let mut r = r.expect("every frequency classified");
            r.resize(n, BigRational::zero());
            r
        })
        .collect();
    let denominator = rational.iter().flatten().fold(BigInt::one(), |a, q| a.lcm(q.denom()));
    let scaled: Vec<Vec<BigInt>> = rational
        .iter()
        .map(|r| r.iter().map(|q| (q * BigRational::from_integer(denominator.clone())).to_integer()).collect())
        .collect();
    let hnf = hermite_basis(&scaled);
    let basis: Vec<f64> = hnf
        .iter()
        .map(|w| {
            w.iter()
                .zip(&independent)
                .map(|(c, &j)| c.to_f64().unwrap_or(0.0) * frequencies[j])
                .sum::<f64>()
                / denominator.to_f64().unwrap_or(1.0)
        })
        .collect();
    let hnf_i64: Vec<Vec<i64>> = hnf
        .iter()
        .map(|r| r.iter().map(|v| v.to_i64().ok_or_else(|| Error::IntegerRelation("coefficient overflow".into()))).collect())
        .collect::<Result<_>>()?;
    let mut coords = Vec::with_capacity(frequencies.len());
    for (k, row) in scaled.iter().enumerate() {
        let target: Vec<i64> = row
            .iter()
            .map(|v| v.to_i64().ok_or_else(|| Error::IntegerRelation("coefficient overflow".into())))
            .collect::<Result<_>>()?;
        let x = crate::real::solve_in_span(&hnf_i64, &target)
            .ok_or_else(|| Error::IntegerRelation(format!("frequency {} outside the lattice", frequencies[k])))?;
        let c: Vec<i64> = x
            .iter()
            .map(|q| {
                if q.is_integer() {
                    q.to_integer().to_i64().ok_or_else(|| Error::IntegerRelation("coefficient overflow".into()))
                } else {
                    Err(Error::IntegerRelation("non-integral coordinate".into()))
                }
            })
            .collect::<Result<_>>()?;
        coords.push(c);
    }
    let non_generic = expected_rank.is_some_and(|r| n < r);
    Ok(GroupBasis { rank: n, basis, coords, non_generic })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(gb: &GroupBasis, x: &[f64]) {
        for (c, v) in gb.coords.iter().zip(x) {
            let s: f64 = c.iter().zip(&gb.basis).map(|(&a, b)| a as f64 * b).sum();
            assert!((s - v).abs() < 1e-9, "{s} vs {v}");
        }
    }

    #[test]
    fn root_two_lattice() {
        let r2 = 2f64.sqrt();
        let x = [1.0, r2, 1.0 + r2, r2 - 1.0];
        let gb = group_basis(&x, Some(2), 1e-9).unwrap();
        assert_eq!(gb.rank, 2);
        assert!(!gb.non_generic);
        check(&gb, &x);
    }

    #[test]
    fn rational_frequencies_flag_non_generic() {
        let x = [1.0, 2.0, 3.0];
        let gb = group_basis(&x, Some(2), 1e-9).unwrap();
        assert_eq!(gb.rank, 1);
        assert!(gb.non_generic);
        assert_eq!(gb.basis, vec![1.0]);
        check(&gb, &x);
    }

    #[test]
    fn refines_to_half_integers() {
        let x = [2.0, 3.0];
        let gb = group_basis(&x, None, 1e-9).unwrap();
        assert_eq!(gb.rank, 1);
        assert!((gb.basis[0] - 1.0).abs() < 1e-12);
        check(&gb, &x);
    }

    #[test]
    fn three_primes() {
        let (a, b, c) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
        let x = [a, b, c, a + b - c, b - a, c - a - b + 2.0 * a];
        let gb = group_basis(&x, Some(3), 1e-9).unwrap();
        assert_eq!(gb.rank, 3);
        check(&gb, &x);
    }

    #[test]
    fn hermite_of_small_lattice() {
        let rows = vec![vec![BigInt::from(2), BigInt::from(0)], vec![BigInt::from(3), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(4)]];
        let h = hermite_basis(&rows);
        assert_eq!(h, vec![vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(4)]]);
    }
}
