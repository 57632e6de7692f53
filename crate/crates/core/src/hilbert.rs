//! Hilbert functions of graded modules given by signed shift data over a positively
//! graded polynomial ring.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chamber::{chamber_complex_2xn, global_lattice, locate, Chamber};
use crate::error::{Error, Result};
use crate::exactlinalg::Lattice;
use crate::quasipoly::{fit_chamber_qp, QuasiPolynomial};
use crate::vpf::{count, series_coeffs, CountTable, DegreeMatrix};

/// Numerator `κ(t) = Σ c_a t^a` of a module's Hilbert series over `ring`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "KappaRepr", into = "KappaRepr")]
pub struct KappaNumerator {
    ring: DegreeMatrix,
    terms: BTreeMap<Vec<i64>, i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KappaRepr {
    ring: DegreeMatrix,
    terms: Vec<KappaTerm>,
}

/// One shift of a κ numerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaTerm {
    pub a: Vec<i64>,
    pub c: i64,
}

impl TryFrom<KappaRepr> for KappaNumerator {
    type Error = Error;

    fn try_from(r: KappaRepr) -> Result<Self> {
        KappaNumerator::new(r.ring, r.terms.into_iter().map(|t| (t.a, t.c)))
    }
}

impl From<KappaNumerator> for KappaRepr {
    fn from(k: KappaNumerator) -> Self {
        KappaRepr {
            terms: k.terms().map(|(a, c)| KappaTerm { a: a.to_vec(), c }).collect(),
            ring: k.ring,
        }
    }
}

impl KappaNumerator {
    /// Builds a numerator, merging repeated shifts and dropping zero coefficients.
    pub fn new<I: IntoIterator<Item = (Vec<i64>, i64)>>(ring: DegreeMatrix, terms: I) -> Result<Self> {
        let mut merged: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for (a, c) in terms {
            if a.len() != ring.dim() {
                return Err(Error::DimensionMismatch {
                    expected: ring.dim(),
                    actual: a.len(),
                });
            }
            let slot = merged.entry(a).or_insert(0);
            *slot = slot
                .checked_add(c)
                .ok_or_else(|| Error::InvalidData("coefficient overflow".into()))?;
        }
        merged.retain(|_, c| *c != 0);
        Ok(KappaNumerator { ring, terms: merged })
    }

    /// `κ = 1`, the ring itself.
    pub fn unit(ring: DegreeMatrix) -> Self {
        let zero = vec![0; ring.dim()];
        KappaNumerator::new(ring, [(zero, 1)]).expect("dimension matches")
    }

    pub fn ring(&self) -> &DegreeMatrix {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], i64)> + '_ {
        self.terms.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn coefficient(&self, a: &[i64]) -> i64 {
        self.terms.get(a).copied().unwrap_or(0)
    }

    /// Shift vectors with nonzero coefficient.
    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of two numerators over the same ring.
    pub fn add(&self, other: &KappaNumerator) -> Result<KappaNumerator> {
        if self.ring != other.ring {
            return Err(Error::InvalidData("numerators live over different rings".into()));
        }
        KappaNumerator::new(
            self.ring.clone(),
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|(a, &c)| (a.clone(), c)),
        )
    }

    pub fn scale(&self, k: i64) -> KappaNumerator {
        KappaNumerator::new(self.ring.clone(), self.terms.iter().map(|(a, &c)| (a.clone(), c * k)))
            .expect("same ring")
    }
}

fn shifted(u: &[i64], a: &[i64]) -> Vec<i64> {
    u.iter().zip(a).map(|(x, y)| x - y).collect()
}

/// `Σ_a c_a · φ(u − a)`, the Hilbert function of the module presented by `κ` at `u`.
pub fn hf_module(kappa: &KappaNumerator, u: &[i64]) -> BigInt {
    hf_module_with(kappa, u, |v| BigInt::from(count(&kappa.ring, v)))
}

/// [`hf_module`] reading counts from a precomputed table over the same ring.
pub fn hf_module_table(kappa: &KappaNumerator, table: &CountTable, u: &[i64]) -> BigInt {
    hf_module_with(kappa, u, |v| BigInt::from(table.get(v)))
}

fn hf_module_with<F: Fn(&[i64]) -> BigInt>(kappa: &KappaNumerator, u: &[i64], phi: F) -> BigInt {
    let mut total = BigInt::zero();
    for (a, &c) in &kappa.terms {
        let v = phi(&shifted(u, a));
        if !v.is_zero() {
            total += v * c;
        }
    }
    if total.is_negative() {
        log::warn!("negative Hilbert function value {total} at {u:?}; shift data is inconsistent");
    }
    total
}

/// Checks `κ(t)·H(S;t)` against [`hf_module`] coefficientwise on `0 ≤ u ≤ bound`.
pub fn series_identity_check(kappa: &KappaNumerator, bound: &[i64]) -> Result<bool> {
    Ok(series_identity_mismatch(kappa, bound)?.is_none())
}

/// First point of the box where the truncated product and [`hf_module`] differ.
pub fn series_identity_mismatch(kappa: &KappaNumerator, bound: &[i64]) -> Result<Option<Vec<i64>>> {
    let series = series_coeffs(&kappa.ring, bound)?;
    for (u, _) in series.iter() {
        let mut product = BigInt::zero();
        for (a, &c) in &kappa.terms {
            let v = shifted(&u, a);
            if v.iter().any(|&x| x < 0) {
                continue;
            }
            let coeff = match series.get(&v) {
                Some(s) => BigInt::from(s.clone()),
                None => BigInt::from(count(&kappa.ring, &v)),
            };
            product += coeff * c;
        }
        if product != hf_module(kappa, &u) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// A Hilbert function value of a bigraded ring with the piece that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigradedValue {
    pub value: BigInt,
    /// Index of the chamber whose quasi-polynomial was evaluated, `None` outside the cone.
    pub chamber: Option<usize>,
    /// Residue of the point modulo the global lattice.
    pub residue: Vec<i64>,
}

/// Chamber quasi-polynomials of `k[T_1..T_n]`, `deg T_i = (d_i, 1)`, on the global lattice.
#[derive(Clone, Debug)]
pub struct BigradedHilbert {
    degrees: Vec<i64>,
    chambers: Vec<Chamber>,
    lattice: Lattice,
    pieces: Vec<QuasiPolynomial>,
}

impl BigradedHilbert {
    pub fn new(degrees: &[i64]) -> Result<Self> {
        let ring = DegreeMatrix::bigraded(degrees)?;
        let chambers = chamber_complex_2xn(degrees)?;
        let lattice = global_lattice(degrees)?;
        let pieces = chambers
            .iter()
            .map(|c| fit_chamber_qp(&ring, c, &lattice))
            .collect::<Result<Vec<_>>>()?;
        Ok(BigradedHilbert {
            degrees: degrees.to_vec(),
            chambers,
            lattice,
            pieces,
        })
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Quasi-polynomial of chamber `i`.
    pub fn chamber_qp(&self, i: usize) -> &QuasiPolynomial {
        &self.pieces[i]
    }

    pub fn value(&self, u: &[i64]) -> BigradedValue {
        let residue = self.lattice.reduce(u);
        let Some(&i) = locate(&self.chambers, u).first() else {
            return BigradedValue {
                value: BigInt::zero(),
                chamber: None,
                residue,
            };
        };
        let v = self.pieces[i].eval(u);
        debug_assert!(v.is_integer());
        BigradedValue {
            value: v.to_integer(),
            chamber: Some(i),
            residue,
        }
    }
}

/// One-shot evaluation of the bigraded Hilbert function through the chamber pieces.
pub fn hf_bigraded_ring(degrees: &[i64], u: &[i64]) -> Result<BigradedValue> {
    Ok(BigradedHilbert::new(degrees)?.value(u))
}
