//! Length-valued scalars that stay exact when the inputs are rational.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Relative tolerance used for every floating-point length comparison.
pub const TOLERANCE: f64 = 1e-9;

/// A real number that is either an exact rational or an `f64`.
///
/// Arithmetic between two exact values stays exact; anything touching a
/// float degrades to a float.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Real::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Real::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Real::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(x: f64) -> Self {
        Real::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => rational_to_f64(q),
            Real::Float(x) => *x,
        }
    }

    /// Drops exactness.
    pub fn to_float(&self) -> Real {
        Real::Float(self.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(q) => q.is_zero(),
            Real::Float(x) => *x == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Real::Exact(_) => true,
            Real::Float(x) => x.is_finite(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Real::Exact(q) => {
                if q.is_positive() {
                    1
                } else if q.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Real::Float(x) => {
                if *x > 0.0 {
                    1
                } else if *x < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.abs()),
            Real::Float(x) => Real::Float(x.abs()),
        }
    }

    pub fn scale(&self, k: i64) -> Real {
        self * &Real::int(k)
    }

    pub fn half(&self) -> Real {
        self / &Real::int(2)
    }

    /// Equality at [`TOLERANCE`] (exact when both sides are exact).
    pub fn approx_eq(&self, other: &Real) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= TOLERANCE * 1f64.max(a.abs()).max(b.abs())
            }
        }
    }

    /// Ordering that reports `Equal` for values within tolerance.
    pub fn cmp_tol(&self, other: &Real) -> Ordering {
        if self.approx_eq(other) {
            Ordering::Equal
        } else {
            self.total_cmp(other)
        }
    }

    pub fn lt_tol(&self, other: &Real) -> bool {
        self.cmp_tol(other) == Ordering::Less
    }

    pub fn le_tol(&self, other: &Real) -> bool {
        self.cmp_tol(other) != Ordering::Greater
    }

    /// Strict total order (no tolerance). Floats use IEEE total order.
    pub fn total_cmp(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    pub fn max(self, other: Real) -> Real {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if self.total_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Parses `p/q`, integers and decimals. Decimals become exact only
    /// when `exact_decimals` is set.
    pub fn parse(s: &str, exact_decimals: bool) -> Result<Real, ParseRealError> {
        let s = s.trim();
        let bad = || ParseRealError(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Real::Exact(BigRational::new(p, q)));
        }
        if let Ok(n) = BigInt::from_str(s) {
            return Ok(Real::Exact(BigRational::from_integer(n)));
        }
        if exact_decimals {
            if let Some(q) = parse_decimal(s) {
                return Ok(Real::Exact(q));
            }
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        Ok(Real::Float(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a number: {0:?}")]
pub struct ParseRealError(pub String);

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let neg = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if shift >= 0 {
        BigRational::from_integer(num * num::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num::pow(ten, (-shift) as usize))
    };
    Some(q)
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Large numerators/denominators: shift both down before dividing.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (q.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n)
    }
}

impl From<BigRational> for Real {
    fn from(q: BigRational) -> Self {
        Real::Exact(q)
    }
}

/// Exact equality for exact pairs; raw `f64` equality otherwise. Use
/// [`Real::approx_eq`] for tolerance comparisons.
impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Real::Float(x) => write!(f, "{x:?}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                match (self, rhs) {
                    (Real::Exact(a), Real::Exact(b)) => Real::Exact(a $op b),
                    _ => Real::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self) $op (&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self) $op rhs
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self $op (&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Float(x) => Real::Float(-x),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -(self.clone())
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Real> for Real {
    fn sum<I: Iterator<Item = &'a Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |a, b| a + b)
    }
}

/// Exact determinant by fraction-carrying Gaussian elimination.
pub fn determinant(matrix: &[Vec<Real>]) -> Real {
    let n = matrix.len();
    let mut a: Vec<Vec<Real>> = matrix.to_vec();
    let mut det = Real::one();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()));
        let Some(p) = pivot else { return Real::zero() };
        if a[p][col].is_zero() {
            return Real::zero();
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det = det * &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] = &a[r][c] - delta;
            }
        }
    }
    det
}

/// Exact rank of an integer matrix (rows are vectors).
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pv = a[rank][col].clone();
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let f = &a[r][col] / &pv;
                for c in col..ncols {
                    let d = &f * &a[rank][c];
                    a[r][c] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exact determinant of a square integer matrix.
pub fn integer_determinant(rows: &[Vec<i64>]) -> BigInt {
    let m: Vec<Vec<Real>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Real::int(x)).collect())
        .collect();
    match determinant(&m) {
        Real::Exact(q) => q.to_integer(),
        Real::Float(_) => unreachable!("integer input stays exact"),
    }
}

/// Solves `x * rows = target` for rational `x` (rows are basis vectors).
/// Returns `None` when `target` is outside the row span.
pub fn solve_in_span(rows: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigRational>> {
    let k = rows.len();
    let n = target.len();
    // Augmented system: columns = basis vectors, one equation per coordinate.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|c| {
            let mut row: Vec<BigRational> = (0..k)
                .map(|i| BigRational::from_integer(rows[i][c].into()))
                .collect();
            row.push(BigRational::from_integer(target[c].into()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][col].clone();
        for c in col..=k {
            a[r][c] = &a[r][c] / &pv;
        }
        for i in 0..n {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in col..=k {
                    let d = &f * &a[r][c];
                    a[i][c] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if (r..n).any(|i| !a[i][k].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][k].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Real::ratio(1, 3);
        let b = Real::ratio(2, 3);
        assert_eq!(&a + &b, Real::one());
        assert!((&a + &b).is_exact());
        assert!(!(a + Real::float(0.5)).is_exact());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Real::parse("3/4", false).unwrap(), Real::ratio(3, 4));
        assert_eq!(Real::parse("7", false).unwrap(), Real::int(7));
        assert!(!Real::parse("0.25", false).unwrap().is_exact());
        assert_eq!(Real::parse("0.25", true).unwrap(), Real::ratio(1, 4));
        assert_eq!(Real::parse("-1.5e1", true).unwrap(), Real::int(-15));
        assert!(Real::parse("abc", false).is_err());
        assert!(Real::parse("1/0", false).is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["5/7", "-3", "0.1"] {
            let r = Real::parse(s, false).unwrap();
            assert_eq!(Real::parse(&r.to_string(), false).unwrap(), r);
        }
    }

    #[test]
    fn determinant_of_known_matrices() {
        let m = vec![
            vec![Real::int(3), Real::int(-1), Real::int(-1)],
            vec![Real::int(-1), Real::int(3), Real::int(-1)],
            vec![Real::int(-1), Real::int(-1), Real::int(3)],
        ];
        assert_eq!(determinant(&m), Real::int(16));
        assert_eq!(
            integer_determinant(&[vec![0, 1], vec![1, 0]]),
            BigInt::from(-1)
        );
        assert_eq!(integer_rank(&[vec![1, 2], vec![2, 4]]), 1);
    }

    #[test]
    fn tolerance_comparisons() {
        let a = Real::float(1.0);
        let b = Real::float(1.0 + 1e-12);
        assert!(a.approx_eq(&b));
        assert!(!a.lt_tol(&b));
        assert!(Real::float(1.0).lt_tol(&Real::float(1.1)));
    }
}
