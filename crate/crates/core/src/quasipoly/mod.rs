//! Quasi-polynomials with respect to a lattice.
//!
//! A [`QuasiPolynomial`] on `L` is stored as a sum of blocks. Each block carries a
//! lattice `M ⊇ L` and one polynomial per coset of `M`. The piece attached to a residue
//! `τ` of `L` is the sum, over blocks, of the block polynomial selected by `τ mod M`.
//! This keeps quasi-polynomials with very large `det(L)` compact while still exposing
//! exactly `det(L)` pieces.

mod fit;
mod polynomial;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactlinalg::Lattice;

pub use fit::{fit_chamber_qp, fit_chamber_qp_with, FitOptions};
pub use polynomial::{format_rational, parse_rational, Polynomial};
pub(crate) use polynomial::rat;

/// One periodic summand: a polynomial per coset of `lattice`.
#[derive(Clone, Debug)]
pub struct Block {
    lattice: Lattice,
    polys: Vec<Polynomial>,
}

impl Block {
    pub fn new(lattice: Lattice, polys: Vec<Polynomial>) -> Result<Self> {
        let n = lattice
            .index()
            .ok_or_else(|| Error::InvalidData("block lattice index too large".into()))?;
        if polys.len() != n {
            return Err(Error::InvalidData(format!(
                "block needs {n} polynomials, got {}",
                polys.len()
            )));
        }
        Ok(Self { lattice, polys })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    fn select(&self, u: &[i64]) -> &Polynomial {
        &self.polys[self.lattice.residue_index(&self.lattice.reduce(u))]
    }
}

/// A function `Z^d → Q` given by one polynomial per coset of a lattice.
#[derive(Clone, Debug)]
pub struct QuasiPolynomial {
    nvars: usize,
    lattice: Lattice,
    blocks: Vec<Block>,
}

impl QuasiPolynomial {
    pub fn zero(lattice: Lattice) -> Self {
        Self {
            nvars: lattice.dim(),
            lattice,
            blocks: Vec::new(),
        }
    }

    pub fn constant(lattice: Lattice, c: BigRational) -> Self {
        let d = lattice.dim();
        Self::from_polynomial(lattice, Polynomial::constant(d, c))
    }

    /// The same polynomial on every coset.
    pub fn from_polynomial(lattice: Lattice, p: Polynomial) -> Self {
        assert_eq!(p.nvars(), lattice.dim(), "variable count mismatch");
        let d = lattice.dim();
        let mut q = Self::zero(lattice);
        q.blocks.push(Block {
            lattice: Lattice::standard(d),
            polys: vec![p],
        });
        q.normalize();
        q
    }

    /// Explicit pieces keyed by canonical residues; all `det(lattice)` must be present.
    pub fn from_pieces(lattice: Lattice, pieces: BTreeMap<Vec<i64>, Polynomial>) -> Result<Self> {
        let n = lattice
            .index()
            .ok_or_else(|| Error::InvalidData("lattice index too large".into()))?;
        if pieces.len() != n {
            return Err(Error::InvalidData(format!(
                "expected {n} pieces, got {}",
                pieces.len()
            )));
        }
        let mut polys = vec![Polynomial::zero(lattice.dim()); n];
        for (r, p) in pieces {
            if lattice.reduce(&r) != r {
                return Err(Error::InvalidData(format!("{r:?} is not a canonical residue")));
            }
            if p.nvars() != lattice.dim() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.dim(),
                    actual: p.nvars(),
                });
            }
            polys[lattice.residue_index(&r)] = p;
        }
        Self::from_blocks(lattice.clone(), vec![Block { lattice, polys }])
    }

    /// Assembles blocks; every block lattice must contain `lattice`.
    pub fn from_blocks(lattice: Lattice, blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            if !lattice.is_sublattice_of(&b.lattice) {
                return Err(Error::LatticeNotRefining);
            }
            if b.polys.iter().any(|p| p.nvars() != lattice.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: lattice.dim(),
                    actual: b.polys[0].nvars(),
                });
            }
        }
        let mut q = Self {
            nvars: lattice.dim(),
            lattice,
            blocks,
        };
        q.normalize();
        Ok(q)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Canonical residue of `u`, the key of the piece used at `u`.
    pub fn residue(&self, u: &[i64]) -> Vec<i64> {
        self.lattice.reduce(u)
    }

    /// Polynomial attached to the coset of `tau`.
    pub fn piece(&self, tau: &[i64]) -> Polynomial {
        let mut p = Polynomial::zero(self.nvars);
        for b in &self.blocks {
            p.add_assign(b.select(tau));
        }
        p
    }

    /// All `det(lattice)` pieces in canonical residue order.
    pub fn pieces(&self) -> impl Iterator<Item = (Vec<i64>, Polynomial)> + '_ {
        self.lattice.residues().map(move |r| {
            let p = self.piece(&r);
            (r, p)
        })
    }

    pub fn eval(&self, u: &[i64]) -> BigRational {
        let mut s = BigRational::zero();
        for b in &self.blocks {
            s += b.select(u).eval(u);
        }
        s
    }

    /// Upper bound on the total degree of every piece; `None` when identically zero.
    pub fn max_degree(&self) -> Option<usize> {
        self.blocks
            .iter()
            .flat_map(|b| b.polys.iter().filter_map(Polynomial::degree))
            .max()
    }

    /// `ξ ↦ c · self(ξ − a)`.
    pub fn shift(&self, a: &[i64], c: &BigRational) -> QuasiPolynomial {
        assert_eq!(a.len(), self.nvars, "shift arity mismatch");
        if c.is_zero() {
            return Self::zero(self.lattice.clone());
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut polys = vec![Polynomial::zero(self.nvars); b.polys.len()];
                for (r, p) in b.lattice.residues().zip(&b.polys) {
                    let moved: Vec<i64> = r.iter().zip(a).map(|(x, y)| x + y).collect();
                    let idx = b.lattice.residue_index(&b.lattice.reduce(&moved));
                    polys[idx] = p.translate(a).scale(c);
                }
                Block {
                    lattice: b.lattice.clone(),
                    polys,
                }
            })
            .collect();
        QuasiPolynomial {
            nvars: self.nvars,
            lattice: self.lattice.clone(),
            blocks,
        }
    }

    pub fn scale(&self, c: &BigRational) -> QuasiPolynomial {
        self.shift(&vec![0; self.nvars], c)
    }

    /// Pointwise sum; both operands must live on the same lattice.
    pub fn add(&self, other: &QuasiPolynomial) -> Result<QuasiPolynomial> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        let mut q = QuasiPolynomial {
            nvars: self.nvars,
            lattice: self.lattice.clone(),
            blocks,
        };
        q.normalize();
        Ok(q)
    }

    /// The same function viewed on a sublattice of the current lattice.
    pub fn refine(&self, finer: &Lattice) -> Result<QuasiPolynomial> {
        if !finer.is_sublattice_of(&self.lattice) {
            return Err(Error::LatticeNotRefining);
        }
        Ok(QuasiPolynomial {
            nvars: self.nvars,
            lattice: finer.clone(),
            blocks: self.blocks.clone(),
        })
    }

    /// Sum after refining both operands to the intersection of their lattices.
    pub fn add_refining(&self, other: &QuasiPolynomial) -> Result<QuasiPolynomial> {
        if self.lattice == other.lattice {
            return self.add(other);
        }
        let common = self.lattice.intersect(&other.lattice)?;
        self.refine(&common)?.add(&other.refine(&common)?)
    }

    /// Merges blocks with a common lattice, moves coset-independent blocks to the
    /// trivial lattice and drops zero blocks.
    fn normalize(&mut self) {
        let d = self.nvars;
        let trivial = Lattice::standard(d);
        let mut merged: Vec<Block> = Vec::new();
        for mut b in std::mem::take(&mut self.blocks) {
            if b.polys.len() > 1 && b.polys.iter().all(|p| *p == b.polys[0]) {
                b = Block {
                    lattice: trivial.clone(),
                    polys: vec![b.polys.swap_remove(0)],
                };
            }
            match merged.iter_mut().find(|m| m.lattice == b.lattice) {
                Some(m) => {
                    for (x, y) in m.polys.iter_mut().zip(&b.polys) {
                        x.add_assign(y);
                    }
                }
                None => merged.push(b),
            }
        }
        merged.retain(|b| b.polys.iter().any(|p| !p.is_zero()));
        merged.sort_by_key(|b| b.lattice.index().unwrap_or(usize::MAX));
        self.blocks = merged;
    }
}

impl PartialEq for QuasiPolynomial {
    /// Equality as functions on `Z^d`.
    fn eq(&self, other: &Self) -> bool {
        if self.nvars != other.nvars {
            return false;
        }
        let Ok(common) = self.lattice.intersect(&other.lattice) else {
            return false;
        };
        common
            .residues()
            .all(|r| self.piece(&r) == other.piece(&r))
    }
}

/// Evaluation at an integer point.
pub fn eval(q: &QuasiPolynomial, u: &[i64]) -> BigRational {
    q.eval(u)
}

/// `ξ ↦ c · q(ξ − a)`.
pub fn shift(q: &QuasiPolynomial, a: &[i64], c: &BigRational) -> QuasiPolynomial {
    q.shift(a, c)
}

/// Pointwise sum on a shared lattice.
pub fn add(q1: &QuasiPolynomial, q2: &QuasiPolynomial) -> Result<QuasiPolynomial> {
    q1.add(q2)
}

/// First point of the box `bounds` satisfying `pred` where the two functions differ.
pub fn first_difference<F: Fn(&[i64]) -> bool>(
    q1: &QuasiPolynomial,
    q2: &QuasiPolynomial,
    pred: F,
    bounds: &[(i64, i64)],
) -> Option<Vec<i64>> {
    assert_eq!(bounds.len(), q1.nvars(), "bounds arity mismatch");
    if bounds.iter().any(|(lo, hi)| lo > hi) {
        return None;
    }
    let mut u: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        if pred(&u) && q1.eval(&u) != q2.eval(&u) {
            return Some(u);
        }
        let mut i = 0;
        loop {
            if i == u.len() {
                return None;
            }
            u[i] += 1;
            if u[i] <= bounds[i].1 {
                break;
            }
            u[i] = bounds[i].0;
            i += 1;
        }
    }
}

/// Whether the two functions agree at every point of the box satisfying `pred`.
pub fn equal_on_region<F: Fn(&[i64]) -> bool>(
    q1: &QuasiPolynomial,
    q2: &QuasiPolynomial,
    pred: F,
    bounds: &[(i64, i64)],
) -> bool {
    first_difference(q1, q2, pred, bounds).is_none()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceRepr {
    residue: Vec<i64>,
    poly: Polynomial,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QpRepr {
    lattice: Lattice,
    pieces: Vec<PieceRepr>,
}

impl Serialize for QuasiPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QpRepr {
            lattice: self.lattice.clone(),
            pieces: self
                .pieces()
                .map(|(residue, poly)| PieceRepr { residue, poly })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuasiPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QpRepr::deserialize(d)?;
        let mut map = BTreeMap::new();
        for p in r.pieces {
            if map.insert(p.residue.clone(), p.poly).is_some() {
                return Err(D::Error::custom(format!("duplicate residue {:?}", p.residue)));
            }
        }
        QuasiPolynomial::from_pieces(r.lattice, map).map_err(D::Error::custom)
    }
}
