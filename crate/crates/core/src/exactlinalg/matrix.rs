use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[i64]>>(columns: &[C]) -> Self {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in rank + 1..self.rows {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                let g = a[rank][col].clone();
                let (top, bottom) = a.split_at_mut(r);
                for (x, y) in bottom[0][col..].iter_mut().zip(&top[rank][col..]) {
                    *x = &*x * &g - y * &f;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// Replaces columns `i`, `j` by `x*ci + y*cj` and `u*ci + v*cj`.
    fn combine_cols(&mut self, i: usize, j: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
        for r in 0..self.rows {
            let ci = self[(r, i)].clone();
            let cj = self[(r, j)].clone();
            self[(r, i)] = x * &ci + y * &cj;
            self[(r, j)] = u * &ci + v * &cj;
        }
    }

    /// `col_j -= q * col_i`
    fn sub_col_multiple(&mut self, j: usize, i: usize, q: &BigInt) {
        for r in 0..self.rows {
            let d = q * &self[(r, i)];
            self[(r, j)] -= d;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Column-style Hermite normal form: returns `(H, U)` with `H = M·U`, `U` unimodular,
/// and `H` lower triangular with positive pivots on the diagonal, entries left of each
/// pivot reduced into `[0, pivot)` and zeros to the right of the leading square block.
pub fn hnf(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(cols);
    if rows > cols {
        return Err(Error::RankDeficient {
            rank: m.rank(),
            rows,
        });
    }
    for i in 0..rows {
        for j in i + 1..cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            let a = h[(i, i)].clone();
            let b = h[(i, j)].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = if eg.gcd.is_negative() {
                (-eg.gcd, -eg.x, -eg.y)
            } else {
                (eg.gcd, eg.x, eg.y)
            };
            let ag = &a / &g;
            let bg = &b / &g;
            // [x -b/g; y a/g] has determinant 1
            let nb = -bg;
            h.combine_cols(i, j, &x, &y, &nb, &ag);
            u.combine_cols(i, j, &x, &y, &nb, &ag);
        }
        if h[(i, i)].is_zero() {
            return Err(Error::RankDeficient {
                rank: m.rank(),
                rows,
            });
        }
        if h[(i, i)].is_negative() {
            h.swap_negate_col(i);
            u.swap_negate_col(i);
        }
        for j in 0..i {
            let q = h[(i, j)].div_floor(&h[(i, i)]);
            if !q.is_zero() {
                h.sub_col_multiple(j, i, &q);
                u.sub_col_multiple(j, i, &q);
            }
        }
    }
    Ok((h, u))
}
