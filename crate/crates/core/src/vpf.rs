//! Vector partition functions: exact counting, truncated generating series and
//! cone membership.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{CheckedAdd, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlinalg::{solve_exact, IntMatrix};

/// A `d x n` nonnegative integer matrix whose columns are the degrees of the ring
/// generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDegreeMatrix")]
pub struct DegreeMatrix {
    d: usize,
    columns: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDegreeMatrix {
    d: usize,
    columns: Vec<Vec<i64>>,
}

impl TryFrom<RawDegreeMatrix> for DegreeMatrix {
    type Error = Error;

    fn try_from(raw: RawDegreeMatrix) -> Result<Self> {
        DegreeMatrix::checked(raw.d, raw.columns)
    }
}

impl DegreeMatrix {
    /// Validates a positive grading of rank `d`.
    pub fn new(d: usize, columns: Vec<Vec<i64>>) -> Result<Self> {
        let m = Self::checked(d, columns)?;
        let rank = m.rank();
        if rank != d {
            return Err(Error::InvalidGrading(format!(
                "degree matrix has rank {rank}, expected {d}"
            )));
        }
        Ok(m)
    }

    /// The ring `k[T_1..T_n]` with `deg T_i = (d_i, 1)`.
    ///
    /// A single repeated degree is admitted; the grading is then supported on one ray
    /// and has rank 1.
    pub fn bigraded(degrees: &[i64]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidGrading("no generator degrees".into()));
        }
        Self::checked(2, degrees.iter().map(|&e| vec![e, 1]).collect())
    }

    fn checked(d: usize, columns: Vec<Vec<i64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGrading("grading rank must be positive".into()));
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: c.len(),
                });
            }
            if c.iter().any(|&x| x < 0) {
                return Err(Error::InvalidGrading(format!("column {j} has a negative entry")));
            }
            if c.iter().all(|&x| x == 0) {
                return Err(Error::InvalidGrading(format!(
                    "column {j} is zero, so the grading is not positive"
                )));
            }
        }
        Ok(Self { d, columns })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.columns)
    }

    pub fn rank(&self) -> usize {
        if self.columns.is_empty() {
            0
        } else {
            self.to_matrix().rank()
        }
    }

    /// First-row degrees when the matrix has the form `[[d_1..d_n],[1..1]]`.
    pub fn bigraded_degrees(&self) -> Option<Vec<i64>> {
        (self.d == 2 && self.columns.iter().all(|c| c[1] == 1))
            .then(|| self.columns.iter().map(|c| c[0]).collect())
    }

    /// Drops column `j`.
    pub fn without_column(&self, j: usize) -> DegreeMatrix {
        let mut columns = self.columns.clone();
        columns.remove(j);
        DegreeMatrix { d: self.d, columns }
    }
}

fn bigraded_dp<T: Clone + Zero + CheckedAdd>(one: T, c: &[i64], m: i64, t: i64) -> Option<T> {
    let (m, t) = (m as usize, t as usize);
    // ways[s * (m + 1) + x]: multisets of size s with weight x over the columns seen so far
    let w = m + 1;
    let mut ways = vec![T::zero(); (t + 1) * w];
    ways[0] = one;
    for &ci in c {
        let ci = ci as usize;
        for s in 1..=t {
            for x in ci..=m {
                let prev = ways[(s - 1) * w + x - ci].clone();
                if !prev.is_zero() {
                    let cur = &ways[s * w + x];
                    ways[s * w + x] = cur.checked_add(&prev)?;
                }
            }
        }
    }
    Some(ways[t * w + m].clone())
}

fn count_bigraded(degrees: &[i64], u: &[i64]) -> BigUint {
    let (mu, t) = (u[0], u[1]);
    let dmin = *degrees.iter().min().expect("nonempty");
    let c: Vec<i64> = degrees.iter().map(|&e| e - dmin).collect();
    let cmax = *c.iter().max().expect("nonempty");
    let m = mu - dmin * t;
    if t < 0 || m < 0 || m > cmax * t {
        return BigUint::zero();
    }
    match bigraded_dp(1u128, &c, m, t) {
        Some(v) => BigUint::from(v),
        None => bigraded_dp(BigUint::from(1u8), &c, m, t).expect("unbounded arithmetic"),
    }
}

struct ColumnRecursion<'a, T> {
    columns: &'a [Vec<i64>],
    memo: HashMap<(usize, Vec<i64>), T>,
}

impl<T: Clone + Zero + CheckedAdd> ColumnRecursion<'_, T> {
    fn go(&mut self, k: usize, u: &[i64], one: &T) -> Option<T> {
        if u.iter().any(|&x| x < 0) {
            return Some(T::zero());
        }
        if k == 0 {
            return Some(if u.iter().all(|&x| x == 0) {
                one.clone()
            } else {
                T::zero()
            });
        }
        if let Some(v) = self.memo.get(&(k, u.to_vec())) {
            return Some(v.clone());
        }
        let a = &self.columns[k - 1];
        let mut total = T::zero();
        let mut v = u.to_vec();
        while v.iter().all(|&x| x >= 0) {
            let sub = self.go(k - 1, &v, one)?;
            total = total.checked_add(&sub)?;
            for (x, y) in v.iter_mut().zip(a) {
                *x -= y;
            }
        }
        self.memo.insert((k, u.to_vec()), total.clone());
        Some(total)
    }
}

fn count_general(columns: &[Vec<i64>], u: &[i64]) -> BigUint {
    let mut fast = ColumnRecursion::<u128> {
        columns,
        memo: HashMap::new(),
    };
    if let Some(v) = fast.go(columns.len(), u, &1) {
        return BigUint::from(v);
    }
    let mut slow = ColumnRecursion::<BigUint> {
        columns,
        memo: HashMap::new(),
    };
    slow.go(columns.len(), u, &BigUint::from(1u8))
        .expect("unbounded arithmetic")
}

/// Number of `λ ∈ N^n` with `A·λ = u`. Any `u` is accepted; points outside the cone
/// count zero.
pub fn count(a: &DegreeMatrix, u: &[i64]) -> BigUint {
    assert_eq!(u.len(), a.dim(), "dimension mismatch in count");
    if a.is_empty() {
        return BigUint::from(u8::from(u.iter().all(|&x| x == 0)));
    }
    match a.bigraded_degrees() {
        Some(deg) => count_bigraded(&deg, u),
        None => count_general(a.columns(), u),
    }
}

/// Coefficients of `∏ 1/(1 − t^{a_i})` on the box `0 ≤ u ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTable {
    bound: Vec<i64>,
    values: Vec<BigUint>,
}

impl SeriesTable {
    pub fn bound(&self) -> &[i64] {
        &self.bound
    }

    fn offset(&self, u: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        let mut radix = 1usize;
        for (&x, &b) in u.iter().zip(&self.bound) {
            if x < 0 || x > b {
                return None;
            }
            idx += x as usize * radix;
            radix *= (b + 1) as usize;
        }
        Some(idx)
    }

    /// Coefficient at `u`, or `None` outside the box.
    pub fn get(&self, u: &[i64]) -> Option<&BigUint> {
        self.offset(u).map(|i| &self.values[i])
    }

    /// All box points with their coefficients, first coordinate varying fastest.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, &BigUint)> + '_ {
        let bound = self.bound.clone();
        self.values.iter().enumerate().map(move |(mut i, v)| {
            let mut u = Vec::with_capacity(bound.len());
            for &b in &bound {
                let r = (b + 1) as usize;
                u.push((i % r) as i64);
                i /= r;
            }
            (u, v)
        })
    }
}

fn series_fill<T: Clone + Zero + CheckedAdd>(one: T, columns: &[Vec<i64>], bound: &[i64]) -> Option<Vec<T>> {
    let dims: Vec<usize> = bound.iter().map(|&b| (b + 1) as usize).collect();
    let size: usize = dims.iter().product();
    let mut table = vec![T::zero(); size];
    table[0] = one;
    let mut strides = Vec::with_capacity(dims.len());
    let mut s = 1usize;
    for &n in &dims {
        strides.push(s);
        s *= n;
    }
    for a in columns {
        if a.iter().zip(bound).any(|(&x, &b)| x > b) {
            continue;
        }
        let shift: usize = a.iter().zip(&strides).map(|(&x, &st)| x as usize * st).sum();
        let mut coords = vec![0i64; dims.len()];
        for idx in 0..size {
            if coords.iter().zip(a).all(|(&c, &x)| c >= x) {
                let prev = table[idx - shift].clone();
                if !prev.is_zero() {
                    table[idx] = table[idx].checked_add(&prev)?;
                }
            }
            for (c, &n) in coords.iter_mut().zip(&dims) {
                *c += 1;
                if (*c as usize) < n {
                    break;
                }
                *c = 0;
            }
        }
    }
    Some(table)
}

/// Truncated expansion of the Hilbert series of the ring graded by `a`.
pub fn series_coeffs(a: &DegreeMatrix, bound: &[i64]) -> Result<SeriesTable> {
    if bound.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: bound.len(),
        });
    }
    if bound.iter().any(|&b| b < 0) {
        return Err(Error::InvalidData("series bound must be componentwise nonnegative".into()));
    }
    let values = match series_fill(1u128, a.columns(), bound) {
        Some(v) => v.into_iter().map(BigUint::from).collect(),
        None => series_fill(BigUint::from(1u8), a.columns(), bound).expect("unbounded arithmetic"),
    };
    Ok(SeriesTable {
        bound: bound.to_vec(),
        values,
    })
}

/// Whether `u` is a nonnegative rational combination of the columns of `a`.
pub fn in_pos_cone(a: &DegreeMatrix, u: &[BigRational]) -> bool {
    if u.len() != a.dim() {
        return false;
    }
    if u.iter().all(Zero::is_zero) {
        return true;
    }
    let n = a.len();
    let d = a.dim();
    // Carathéodory: a linearly independent subset of size <= d suffices
    let mut subset = Vec::with_capacity(d);
    fn rec(a: &DegreeMatrix, u: &[BigRational], start: usize, k: usize, subset: &mut Vec<usize>) -> bool {
        if subset.len() == k {
            let m: Vec<Vec<BigRational>> = (0..a.dim())
                .map(|i| {
                    subset
                        .iter()
                        .map(|&j| BigRational::from_integer(BigInt::from(a.columns()[j][i])))
                        .collect()
                })
                .collect();
            return solve_exact(&m, u)
                .is_some_and(|x| x.iter().all(|v| *v >= BigRational::zero()));
        }
        for j in start..a.len() {
            subset.push(j);
            if rec(a, u, j + 1, k, subset) {
                return true;
            }
            subset.pop();
        }
        false
    }
    (1..=d.min(n)).any(|k| rec(a, u, 0, k, &mut subset))
}

/// Integer-point convenience wrapper for [`in_pos_cone`].
pub fn in_pos_cone_int(a: &DegreeMatrix, u: &[i64]) -> bool {
    let q: Vec<BigRational> = u
        .iter()
        .map(|&x| BigRational::from_integer(BigInt::from(x)))
        .collect();
    in_pos_cone(a, &q)
}

/// Precomputed bigraded counts for `0 ≤ t ≤ tmax`, falling back to [`count`] elsewhere.
#[derive(Clone, Debug)]
pub struct CountTable {
    ring: DegreeMatrix,
    degrees: Option<(i64, i64)>,
    tmax: i64,
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn new(ring: &DegreeMatrix, tmax: i64) -> Self {
        let mut table = CountTable {
            ring: ring.clone(),
            degrees: None,
            tmax: -1,
            rows: Vec::new(),
        };
        let Some(deg) = ring.bigraded_degrees() else {
            return table;
        };
        let dmin = *deg.iter().min().expect("nonempty");
        let cmax = deg.iter().max().expect("nonempty") - dmin;
        let tmax = tmax.max(0);
        let bound = [cmax * tmax, tmax];
        let shifted: Vec<Vec<i64>> = deg.iter().map(|&e| vec![e - dmin, 1]).collect();
        let reduced = DegreeMatrix {
            d: 2,
            columns: shifted,
        };
        let series = series_coeffs(&reduced, &bound).expect("valid bound");
        table.rows = (0..=tmax)
            .map(|t| {
                (0..=cmax * t)
                    .map(|m| series.get(&[m, t]).expect("in box").clone())
                    .collect()
            })
            .collect();
        table.degrees = Some((dmin, cmax));
        table.tmax = tmax;
        table
    }

    pub fn ring(&self) -> &DegreeMatrix {
        &self.ring
    }

    pub fn get(&self, u: &[i64]) -> BigUint {
        if let Some((dmin, cmax)) = self.degrees {
            let (mu, t) = (u[0], u[1]);
            if (0..=self.tmax).contains(&t) {
                let m = mu - dmin * t;
                if m < 0 || m > cmax * t {
                    return BigUint::zero();
                }
                return self.rows[t as usize][m as usize].clone();
            }
        }
        count(&self.ring, u)
    }

    /// Machine-sized lookup, `None` when the value does not fit.
    pub fn get_i128(&self, u: &[i64]) -> Option<i128> {
        self.get(u).to_i128()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(deg: &[i64]) -> DegreeMatrix {
        DegreeMatrix::bigraded(deg).unwrap()
    }

    fn brute(deg: &[i64], mu: i64, t: i64) -> u64 {
        fn rec(deg: &[i64], mu: i64, t: i64) -> u64 {
            if t == 0 {
                return u64::from(mu == 0);
            }
            match deg.split_first() {
                None => 0,
                Some((&e, rest)) => (0..=t).map(|k| rec(rest, mu - k * e, t - k)).sum(),
            }
        }
        if t < 0 {
            0
        } else {
            rec(deg, mu, t)
        }
    }

    #[test]
    fn count_examples() {
        let a = ring(&[2, 3, 6, 7]);
        assert_eq!(count(&a, &[0, 0]), BigUint::from(1u8));
        assert_eq!(count(&a, &[9, 2]), BigUint::from(2u8));
        assert_eq!(count(&a, &[5, 2]), BigUint::from(1u8));
        assert_eq!(count(&a, &[1, 0]), BigUint::zero());
        let b = ring(&[2, 3, 6]);
        assert_eq!(count(&b, &[10, 2]), BigUint::zero());
        assert_eq!(count(&b, &[23, 9]), BigUint::from(2u8));
        assert_eq!(count(&b, &[-3, 2]), BigUint::zero());
    }

    #[test]
    fn bigraded_matches_brute_force() {
        for deg in [&[2i64, 3, 6][..], &[0, 4, 6, 10], &[1, 2, 2, 5, 9], &[5, 5, 5, 9]] {
            let a = ring(deg);
            for t in 0..7 {
                for mu in -2..=10 * t + 2 {
                    assert_eq!(count(&a, &[mu, t]), BigUint::from(brute(deg, mu, t)));
                }
            }
        }
    }

    #[test]
    fn general_path_agrees_with_bigraded_path() {
        let deg = [2i64, 3, 6, 7];
        let cols: Vec<Vec<i64>> = deg.iter().map(|&e| vec![1, e]).collect();
        let swapped = DegreeMatrix::new(2, cols).unwrap();
        assert!(swapped.bigraded_degrees().is_none());
        let a = ring(&deg);
        for t in 0..8 {
            for mu in 0..=7 * t {
                assert_eq!(count(&a, &[mu, t]), count(&swapped, &[t, mu]));
            }
        }
    }

    #[test]
    fn rejects_bad_gradings() {
        assert!(DegreeMatrix::new(2, vec![vec![1, 0], vec![0, 0]]).is_err());
        assert!(DegreeMatrix::new(2, vec![vec![1, -1], vec![0, 1]]).is_err());
        assert!(matches!(
            DegreeMatrix::new(2, vec![vec![1, 1], vec![2, 2]]),
            Err(Error::InvalidGrading(_))
        ));
        assert!(DegreeMatrix::bigraded(&[]).is_err());
        assert_eq!(DegreeMatrix::bigraded(&[5, 5]).unwrap().rank(), 1);
    }

    #[test]
    fn huge_counts_fall_back_to_bignum() {
        let a = ring(&[0, 1]);
        // coefficient of x^m y^t in 1/((1-y)(1-xy)) is 1 for m <= t
        assert_eq!(count(&a, &[500, 1000]), BigUint::from(1u8));
        let many = ring(&[0; 40]);
        // C(t + 39, 39) for t = 400 exceeds u128
        let v = count(&many, &[0, 400]);
        assert!(v.bits() > 128);
        let g = DegreeMatrix::new(1, vec![vec![1]; 40]).unwrap();
        assert_eq!(count(&g, &[400]), v);
    }

    #[test]
    fn series_examples() {
        let single = DegreeMatrix::bigraded(&[1]).unwrap();
        let s = series_coeffs(&single, &[3, 3]).unwrap();
        for (u, v) in s.iter() {
            let expect = u8::from(u[0] == u[1]);
            assert_eq!(*v, BigUint::from(expect), "at {u:?}");
        }
        let a = ring(&[2, 3, 6]);
        let s = series_coeffs(&a, &[12, 2]).unwrap();
        assert_eq!(s.get(&[12, 2]), Some(&BigUint::from(1u8)));
        assert_eq!(s.get(&[9, 2]), Some(&BigUint::from(1u8)));
        assert_eq!(s.get(&[10, 2]), Some(&BigUint::zero()));
        assert_eq!(s.get(&[13, 2]), None);
        let empty = DegreeMatrix::new(2, vec![]).unwrap_err();
        assert!(matches!(empty, Error::InvalidGrading(_)));
        let empty = DegreeMatrix { d: 2, columns: vec![] };
        let s = series_coeffs(&empty, &[2, 2]).unwrap();
        for (u, v) in s.iter() {
            assert_eq!(*v, BigUint::from(u8::from(u == [0, 0])));
        }
    }

    #[test]
    fn cone_membership() {
        let a = ring(&[2, 3, 6]);
        assert!(in_pos_cone_int(&a, &[0, 0]));
        assert!(!in_pos_cone_int(&a, &[7, 1]));
        assert!(in_pos_cone_int(&a, &[5, 2]));
        assert!(in_pos_cone_int(&a, &[6, 1]));
        assert!(!in_pos_cone_int(&a, &[-1, 0]));
        let half = BigRational::new(1.into(), 2.into());
        let u = [half.clone() * BigInt::from(5), half];
        assert!(in_pos_cone(&a, &u));
    }

    #[test]
    fn count_table_matches_count() {
        let a = ring(&[2, 3, 6]);
        let table = CountTable::new(&a, 12);
        for t in -1..15 {
            for mu in -3..80 {
                assert_eq!(table.get(&[mu, t]), count(&a, &[mu, t]));
            }
        }
    }

    proptest! {
        #[test]
        fn count_equals_series(deg in proptest::collection::vec(0i64..8, 1..5)) {
            let a = ring(&deg);
            let s = series_coeffs(&a, &[40, 6]).unwrap();
            for (u, v) in s.iter() {
                prop_assert_eq!(v, &count(&a, &u));
            }
        }

        #[test]
        fn outside_cone_counts_zero(deg in proptest::collection::vec(0i64..8, 2..5), mu in -5i64..60, t in -2i64..8) {
            let a = ring(&deg);
            if !in_pos_cone_int(&a, &[mu, t]) {
                prop_assert!(count(&a, &[mu, t]).is_zero());
            }
        }

        #[test]
        fn column_recursion(deg in proptest::collection::vec(0i64..6, 2..5), mu in 0i64..30, t in 0i64..6) {
            let a = ring(&deg);
            let last = a.columns().last().unwrap().clone();
            let rest = a.without_column(a.len() - 1);
            let mut total = BigUint::zero();
            let mut k = 0;
            while t - k >= 0 {
                total += count(&rest, &[mu - k * last[0], t - k]);
                k += 1;
            }
            prop_assert_eq!(count(&a, &[mu, t]), total);
        }

        #[test]
        fn permutation_invariance(mut deg in proptest::collection::vec(0i64..8, 2..5), mu in 0i64..40, t in 0i64..6) {
            let before = count(&ring(&deg), &[mu, t]);
            deg.reverse();
            prop_assert_eq!(count(&ring(&deg), &[mu, t]), before);
        }
    }
}
