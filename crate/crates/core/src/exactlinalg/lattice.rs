use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{hnf, IntMatrix};
use crate::error::{Error, Result};

/// A full-rank sublattice of `Z^d`, stored by its column-style Hermite basis.
///
/// The basis is lower triangular with positive diagonal, so the canonical coset
/// representatives are exactly the vectors `r` with `0 <= r[j] < basis[j][j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    basis: IntMatrix,
    cols: Vec<Vec<i64>>,
    det: BigInt,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeRepr {
    basis: Vec<Vec<i64>>,
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr { basis: l.cols }
    }
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        Lattice::from_columns(&r.basis)
    }
}

impl Lattice {
    /// `Z^d` itself.
    pub fn standard(d: usize) -> Self {
        let cols = (0..d)
            .map(|j| (0..d).map(|i| i64::from(i == j)).collect())
            .collect();
        Self {
            basis: IntMatrix::identity(d),
            cols,
            det: BigInt::one(),
        }
    }

    /// Integer span of the given vectors, which must span `Q^d`.
    pub fn from_columns<C: AsRef<[i64]>>(vectors: &[C]) -> Result<Self> {
        let d = vectors
            .first()
            .map(|v| v.as_ref().len())
            .ok_or(Error::RankDeficient { rank: 0, rows: 0 })?;
        for v in vectors {
            if v.as_ref().len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: v.as_ref().len(),
                });
            }
        }
        Self::from_matrix(&IntMatrix::from_columns(vectors))
    }

    /// Integer span of the columns of `m`.
    pub fn from_matrix(m: &IntMatrix) -> Result<Self> {
        let d = m.rows();
        if d == 0 {
            return Err(Error::RankDeficient { rank: 0, rows: 0 });
        }
        let (h, _) = hnf(m)?;
        let mut basis = IntMatrix::zeros(d, d);
        let mut cols = vec![vec![0i64; d]; d];
        let mut det = BigInt::one();
        for j in 0..d {
            for i in 0..d {
                let x = &h[(i, j)];
                basis[(i, j)] = x.clone();
                cols[j][i] = x.to_i64().ok_or_else(|| {
                    Error::InvalidData("lattice basis entry exceeds the 64-bit range".into())
                })?;
            }
            det *= &h[(j, j)];
        }
        Ok(Self { basis, cols, det })
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Index of the lattice in `Z^d`.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// Number of cosets as a machine integer, if it fits.
    pub fn index(&self) -> Option<usize> {
        self.det.to_usize()
    }

    /// Hermite basis as a `d x d` lower-triangular matrix (basis vectors are columns).
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Hermite basis vectors.
    pub fn columns(&self) -> &[Vec<i64>] {
        &self.cols
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.dim()).map(|j| self.cols[j][j]).collect()
    }

    /// Canonical representative of `v + L`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.dim(), "dimension mismatch in reduce");
        let mut w: Vec<i128> = v.iter().map(|&x| i128::from(x)).collect();
        for j in 0..self.dim() {
            let col = &self.cols[j];
            let q = Integer::div_floor(&w[j], &i128::from(col[j]));
            if q != 0 {
                for i in j..self.dim() {
                    w[i] -= q * i128::from(col[i]);
                }
            }
        }
        w.into_iter().map(|x| x as i64).collect()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// True when every vector of `self` lies in `other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.dim() == other.dim() && self.cols.iter().all(|c| other.contains(c))
    }

    /// Position of a canonical representative in `residues()`.
    pub fn residue_index(&self, r: &[i64]) -> usize {
        let mut idx = 0usize;
        let mut radix = 1usize;
        for (j, &x) in r.iter().enumerate() {
            idx += x as usize * radix;
            radix *= self.cols[j][j] as usize;
        }
        idx
    }

    /// Canonical coset representatives, first coordinate varying fastest.
    pub fn residues(&self) -> Residues<'_> {
        Residues {
            diag: self.diagonal(),
            next: Some(vec![0; self.dim()]),
            _lattice: self,
        }
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        let d = self.dim();
        if other.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: other.dim(),
            });
        }
        // kernel of [B1 | -B2] gives the pairs (x, y) with B1 x = B2 y
        let mut m = IntMatrix::zeros(d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.basis[(i, j)].clone();
                m[(i, d + j)] = -other.basis[(i, j)].clone();
            }
        }
        let (_, u) = hnf(&m)?;
        let mut gens = IntMatrix::zeros(d, d);
        for k in 0..d {
            let x: Vec<BigInt> = (0..d).map(|i| u[(i, d + k)].clone()).collect();
            let v = self.basis.mul_vec(&x);
            for i in 0..d {
                gens[(i, k)] = v[i].clone();
            }
        }
        Lattice::from_matrix(&gens)
    }

    /// Intersection of a nonempty family.
    pub fn intersect_all<'a, I: IntoIterator<Item = &'a Lattice>>(lattices: I) -> Result<Lattice> {
        let mut it = lattices.into_iter();
        let first = it
            .next()
            .ok_or(Error::RankDeficient { rank: 0, rows: 0 })?
            .clone();
        it.try_fold(first, |acc, l| acc.intersect(l))
    }
}

/// Iterator over the canonical residues of a lattice.
pub struct Residues<'a> {
    diag: Vec<i64>,
    next: Option<Vec<i64>>,
    _lattice: &'a Lattice,
}

impl Iterator for Residues<'_> {
    type Item = Vec<i64>;
    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut n = cur.clone();
        let mut carry = true;
        for (j, x) in n.iter_mut().enumerate() {
            *x += 1;
            if *x < self.diag[j] {
                carry = false;
                break;
            }
            *x = 0;
        }
        if !carry {
            self.next = Some(n);
        }
        Some(cur)
    }
}

/// `|det|` of the 2x2 matrix with columns `(a, 1)` and `(b, 1)`.
pub fn pair_det(a: i64, b: i64) -> i64 {
    (a - b).abs()
}

/// Whether `v` solves `basis * x = v` with integral `x`, by rational back-substitution.
pub fn solves_integrally(basis: &IntMatrix, v: &[BigInt]) -> bool {
    let d = basis.rows();
    let mut rest = v.to_vec();
    for j in 0..d {
        let p = &basis[(j, j)];
        if p.is_zero() {
            return false;
        }
        let (q, r) = rest[j].div_rem(p);
        if !r.is_zero() {
            return false;
        }
        for i in j..d {
            let s = &q * &basis[(i, j)];
            rest[i] -= s;
        }
    }
    rest.iter().all(Zero::is_zero)
}
