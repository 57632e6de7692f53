//! Recovery of chamber quasi-polynomials from the counting oracle.
//!
//! For bigraded matrices the unknown function on a chamber `cone{(lo,1),(hi,1)}` is
//! written as a sum of periodic blocks. Every set `S` of distinct degrees that are
//! congruent modulo some `g` and straddle the chamber contributes a block periodic
//! modulo `{μ ≡ r·t (mod g')}`, where `g'` is the gcd of the differences in `S`, with
//! polynomials of degree `|S| − 2` counted with multiplicity. The coefficients are
//! solved exactly from all lattice points of the chamber below a height `T`, then
//! checked against the oracle above `T` and on both boundary rays.
//!
//! Other two-dimensional gradings fall back to per-coset interpolation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::{polynomial::format_rational, Block, Polynomial, QuasiPolynomial};
use crate::chamber::Chamber;
use crate::error::{Error, Result};
use crate::exactlinalg::{solve_exact, solve_sparse, Lattice, SparseRow};
use crate::vpf::{count, CountTable, DegreeMatrix};

/// Tuning knobs for [`fit_chamber_qp_with`].
#[derive(Clone, Debug)]
pub struct FitOptions {
    /// Minimum number of validation points checked against the oracle.
    pub validation_points: usize,
    /// How many times the sampling height is doubled after a failed validation.
    pub max_rounds: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            validation_points: 200,
            max_rounds: 3,
        }
    }
}

/// Fits the quasi-polynomial of `A` on the closed chamber `C`, with pieces indexed by
/// the residues of `L`. `L` must be contained in the chamber lattice.
pub fn fit_chamber_qp(a: &DegreeMatrix, c: &Chamber, l: &Lattice) -> Result<QuasiPolynomial> {
    fit_chamber_qp_with(a, c, l, &FitOptions::default())
}

pub fn fit_chamber_qp_with(
    a: &DegreeMatrix,
    c: &Chamber,
    l: &Lattice,
    opts: &FitOptions,
) -> Result<QuasiPolynomial> {
    if a.dim() != 2 || l.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: if a.dim() != 2 { a.dim() } else { l.dim() },
        });
    }
    if !l.is_sublattice_of(&c.lattice) {
        return Err(Error::LatticeNotRefining);
    }
    match a.bigraded_degrees() {
        Some(deg)
            if c.generators[0][1] == 1
                && c.generators[1][1] == 1
                && deg.contains(&c.lo())
                && deg.contains(&c.hi()) =>
        {
            fit_bigraded(a, &deg, c, l, opts)
        }
        _ => fit_generic(a, c, l, opts),
    }
}

/// `(g, r, k)`: block periodic modulo `{μ ≡ r t (mod g)}` with degree bound `k`.
pub(crate) fn ansatz_blocks(degrees: &[i64], lo: i64, hi: i64) -> Vec<(i64, i64, usize)> {
    let mut mult: BTreeMap<i64, usize> = BTreeMap::new();
    for &d in degrees {
        *mult.entry(d).or_default() += 1;
    }
    let e: Vec<i64> = mult.keys().copied().collect();
    let span = e[e.len() - 1] - e[0];
    let mut best: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for g in 1..=span.max(1) {
        for r in 0..g {
            let s: Vec<i64> = e.iter().copied().filter(|x| x.rem_euclid(g) == r).collect();
            if !(s.iter().any(|&x| x <= lo) && s.iter().any(|&x| x >= hi)) {
                continue;
            }
            let g2 = s.iter().fold(0i64, |acc, &x| acc.gcd(&(x - s[0])));
            let r2 = s[0].rem_euclid(g2);
            let k = s.iter().map(|x| mult[x]).sum::<usize>() - 2;
            let slot = best.entry((g2, r2)).or_insert(k);
            *slot = (*slot).max(k);
        }
    }
    let all: Vec<(i64, i64, usize)> = best.into_iter().map(|((g, r), k)| (g, r, k)).collect();
    all.iter()
        .copied()
        .filter(|&(g1, r1, k1)| {
            !all.iter().any(|&(g2, r2, k2)| {
                (g2, r2, k2) != (g1, r1, k1) && g2 % g1 == 0 && r2 % g1 == r1 && k2 >= k1
            })
        })
        .collect()
}

fn monomials(k: usize) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for deg in 0..=k as u32 {
        for p in (0..=deg).rev() {
            out.push([p, deg - p]);
        }
    }
    out
}

struct Layout {
    lattices: Vec<Lattice>,
    monos: Vec<Vec<[u32; 2]>>,
    offsets: Vec<usize>,
    ncols: usize,
}

impl Layout {
    fn new(blocks: &[(i64, i64, usize)]) -> Self {
        let mut lattices = Vec::new();
        let mut monos = Vec::new();
        let mut offsets = Vec::new();
        let mut ncols = 0;
        for &(g, r, k) in blocks {
            let m = Lattice::from_columns(&[[r, 1], [g, 0]]).expect("full rank");
            let ms = monomials(k);
            offsets.push(ncols);
            ncols += g as usize * ms.len();
            lattices.push(m);
            monos.push(ms);
        }
        Layout {
            lattices,
            monos,
            offsets,
            ncols,
        }
    }

    fn row(&self, u: &[i64]) -> SparseRow {
        let mu = BigInt::from(u[0]);
        let t = BigInt::from(u[1]);
        let mut row = Vec::new();
        for ((m, ms), &off) in self.lattices.iter().zip(&self.monos).zip(&self.offsets) {
            let idx = m.residue_index(&m.reduce(u));
            let base = off + idx * ms.len();
            for (j, e) in ms.iter().enumerate() {
                let v = mu.pow(e[0]) * t.pow(e[1]);
                if !v.is_zero() {
                    row.push((base + j, v));
                }
            }
        }
        row
    }

    fn blocks(&self, sol: &[BigRational]) -> Vec<Block> {
        self.lattices
            .iter()
            .zip(&self.monos)
            .zip(&self.offsets)
            .map(|((m, ms), &off)| {
                let n = m.index().expect("small modulus");
                let polys = (0..n)
                    .map(|idx| {
                        Polynomial::from_terms(
                            2,
                            ms.iter().enumerate().map(|(j, e)| {
                                (vec![e[0], e[1]], sol[off + idx * ms.len() + j].clone())
                            }),
                        )
                    })
                    .collect();
                Block::new(m.clone(), polys).expect("sized by index")
            })
            .collect()
    }
}

fn chamber_points(lo: i64, hi: i64, t_range: std::ops::RangeInclusive<i64>) -> impl Iterator<Item = [i64; 2]> {
    t_range.flat_map(move |t| (lo * t..=hi * t).map(move |mu| [mu, t]))
}

fn points_below(lo: i64, hi: i64, t: i64) -> usize {
    (t * (t + 1) / 2 * (hi - lo) + (t + 1)) as usize
}

fn mismatch(u: &[i64], expected: &BigInt, fitted: &BigRational) -> Error {
    Error::ValidationFailed {
        point: u.to_vec(),
        expected: expected.to_string(),
        fitted: format_rational(fitted),
    }
}

fn fit_bigraded(
    a: &DegreeMatrix,
    degrees: &[i64],
    c: &Chamber,
    l: &Lattice,
    opts: &FitOptions,
) -> Result<QuasiPolynomial> {
    let (lo, hi) = (c.lo(), c.hi());
    let blocks = ansatz_blocks(degrees, lo, hi);
    let gmax = blocks.iter().map(|b| b.0).max().unwrap_or(1);
    let kmax = blocks.iter().map(|b| b.2).max().unwrap_or(0);
    let layout = Layout::new(&blocks);
    let mut height = (2 * gmax).max(kmax as i64 + 2).max(4);
    while points_below(lo, hi, height) < 2 * layout.ncols + 10 {
        height += 1;
    }
    let mut last_err = None;
    for round in 0..=opts.max_rounds {
        let top = 3 * height;
        let table = CountTable::new(a, top);
        let value = |u: &[i64]| BigInt::from(table.get(u));
        let pts: Vec<[i64; 2]> = chamber_points(lo, hi, 0..=height).collect();
        let rows: Vec<SparseRow> = pts.iter().map(|u| layout.row(u)).collect();
        let rhs: Vec<BigInt> = pts.iter().map(|u| value(u)).collect();
        log::debug!(
            "chamber {}: {} unknowns, {} samples, height {height}",
            c.index,
            layout.ncols,
            pts.len()
        );
        let Some(sol) = solve_sparse(&rows, &rhs, layout.ncols) else {
            return Err(Error::InterpolationInconsistent {
                chamber: c.index,
                max_degree: kmax,
            });
        };
        let qp = QuasiPolynomial::from_blocks(l.clone(), layout.blocks(&sol))?;
        let target = opts.validation_points.max(3 * pts.len());
        match validate_bigraded(&qp, lo, hi, height, top, target, &value) {
            Ok(()) => return Ok(qp),
            Err(e) => {
                log::debug!("chamber {} round {round}: {e}", c.index);
                last_err = Some(e);
                height *= 2;
            }
        }
    }
    Err(last_err.expect("at least one round"))
}

fn validate_bigraded<F: Fn(&[i64]) -> BigInt>(
    qp: &QuasiPolynomial,
    lo: i64,
    hi: i64,
    height: i64,
    top: i64,
    target: usize,
    value: &F,
) -> Result<()> {
    let check = |u: &[i64]| -> Result<()> {
        let expected = value(u);
        let fitted = qp.eval(u);
        if fitted != BigRational::from_integer(expected.clone()) {
            return Err(mismatch(u, &expected, &fitted));
        }
        Ok(())
    };
    for t in 0..=top {
        check(&[lo * t, t])?;
        check(&[hi * t, t])?;
    }
    let band = points_below(lo, hi, top) - points_below(lo, hi, height);
    let stride = band.div_ceil(target.max(1)).max(1);
    for (k, u) in chamber_points(lo, hi, height + 1..=top).enumerate() {
        if k % stride == 0 {
            check(&u)?;
        }
    }
    Ok(())
}

fn binom_usize(n: usize, k: usize) -> usize {
    num_integer::binomial(n, k)
}

fn fit_generic(a: &DegreeMatrix, c: &Chamber, l: &Lattice, opts: &FitOptions) -> Result<QuasiPolynomial> {
    let k = a.len().saturating_sub(2);
    let monos = monomials(k);
    let need = 2 * binom_usize(k + 2, 2) + 2;
    let ncos = l
        .index()
        .ok_or_else(|| Error::InvalidData("lattice index too large for coset interpolation".into()))?;
    let mut radius = 4 * (k as i64 + 2);
    for _ in 0..=opts.max_rounds + 4 {
        let mut groups: BTreeMap<Vec<i64>, Vec<[i64; 2]>> = BTreeMap::new();
        for x in -radius..=radius {
            for y in -radius..=radius {
                if c.contains(&[x, y]) {
                    groups.entry(l.reduce(&[x, y])).or_default().push([x, y]);
                }
            }
        }
        if groups.len() < ncos || groups.values().any(|g| g.len() < need) {
            radius *= 2;
            continue;
        }
        let mut pieces = BTreeMap::new();
        for (res, pts) in &groups {
            let m: Vec<Vec<BigRational>> = pts
                .iter()
                .map(|u| {
                    monos
                        .iter()
                        .map(|e| BigRational::from_integer(BigInt::from(u[0]).pow(e[0]) * BigInt::from(u[1]).pow(e[1])))
                        .collect()
                })
                .collect();
            let b: Vec<BigRational> = pts
                .iter()
                .map(|u| BigRational::from_integer(BigInt::from(count(a, u))))
                .collect();
            let sol = solve_exact(&m, &b).ok_or(Error::InterpolationInconsistent {
                chamber: c.index,
                max_degree: k,
            })?;
            let p = Polynomial::from_terms(
                2,
                monos.iter().zip(sol).map(|(e, v)| (vec![e[0], e[1]], v)),
            );
            pieces.insert(res.clone(), p);
        }
        let qp = QuasiPolynomial::from_pieces(l.clone(), pieces)?;
        let mut checked = 0usize;
        let outer = 2 * radius;
        for x in -outer..=outer {
            for y in -outer..=outer {
                if (x.abs() > radius || y.abs() > radius) && c.contains(&[x, y]) {
                    let expected = BigInt::from(count(a, &[x, y]));
                    let fitted = qp.eval(&[x, y]);
                    if fitted != BigRational::from_integer(expected.clone()) {
                        return Err(mismatch(&[x, y], &expected, &fitted));
                    }
                    checked += 1;
                    if checked >= opts.validation_points.max(64) {
                        return Ok(qp);
                    }
                }
            }
        }
        return Ok(qp);
    }
    Err(Error::InvalidData(format!(
        "chamber {} has too few lattice points per coset for interpolation",
        c.index
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chamber::{chamber_complex_2xn, global_lattice};
    use crate::quasipoly::rat;
    use num_traits::ToPrimitive;

    fn max_denominator(q: &QuasiPolynomial) -> Option<u64> {
        q.blocks()
            .iter()
            .flat_map(|b| b.polys().iter())
            .flat_map(|p| p.terms().values())
            .map(|c| c.denom().to_u64().unwrap_or(u64::MAX))
            .max()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn example_blocks() {
        assert_eq!(ansatz_blocks(&[2, 3, 6], 2, 3), vec![(1, 0, 1), (4, 2, 0)]);
        assert_eq!(
            ansatz_blocks(&[2, 3, 6], 3, 6),
            vec![(1, 0, 1), (3, 0, 0), (4, 2, 0)]
        );
    }

    #[test]
    fn example_chamber_one_pieces() {
        let deg = [2, 3, 6];
        let a = DegreeMatrix::bigraded(&deg).unwrap();
        let ch = chamber_complex_2xn(&deg).unwrap();
        let lam = global_lattice(&deg).unwrap();
        let qp = fit_chamber_qp(&a, &ch[0], &lam).unwrap();
        assert_eq!(qp.pieces().count(), 12);
        for (r, p) in qp.pieces() {
            let i = (r[0] - 2 * r[1]).rem_euclid(4);
            let expect = Polynomial::from_terms(
                2,
                [
                    (vec![1, 0], q(1, 4)),
                    (vec![0, 1], q(-1, 2)),
                    (vec![0, 0], q(4 - i, 4)),
                ],
            );
            assert_eq!(p, expect, "residue {r:?}");
        }
        assert_eq!(qp.eval(&[23, 9]), rat(2));
        assert_eq!(qp.eval(&[20, 9]), rat(1));
        assert_eq!(qp.eval(&[19, 9]), rat(1));
    }

    #[test]
    fn example_chamber_two_pieces() {
        let deg = [2, 3, 6];
        let a = DegreeMatrix::bigraded(&deg).unwrap();
        let ch = chamber_complex_2xn(&deg).unwrap();
        let lam = global_lattice(&deg).unwrap();
        let qp = fit_chamber_qp(&a, &ch[1], &lam).unwrap();
        for (r, p) in qp.pieces() {
            let i = (r[0] - 2 * r[1]).rem_euclid(4);
            let j = (r[0] - 3 * r[1]).rem_euclid(3);
            let extra = if j == 0 { 12 } else { 0 };
            let expect = Polynomial::from_terms(
                2,
                [
                    (vec![1, 0], q(-1, 12)),
                    (vec![0, 1], q(6, 12)),
                    (vec![0, 0], q(4 * j - 3 * i + extra, 12)),
                ],
            );
            assert_eq!(p, expect, "residue {r:?}");
        }
        assert_eq!(qp.eval(&[12, 2]), rat(1));
        assert_eq!(qp.eval(&[10, 2]), rat(0));
    }

    #[test]
    fn chamber_lattice_and_sublattices_accepted() {
        let deg = [2, 3, 6];
        let a = DegreeMatrix::bigraded(&deg).unwrap();
        let ch = chamber_complex_2xn(&deg).unwrap();
        let own = fit_chamber_qp(&a, &ch[0], &ch[0].lattice).unwrap();
        assert_eq!(own.pieces().count(), 4);
        let err = fit_chamber_qp(&a, &ch[1], &Lattice::standard(2)).unwrap_err();
        assert_eq!(err, Error::LatticeNotRefining);
    }

    #[test]
    fn simplicial_matrix_has_constant_pieces() {
        let a = DegreeMatrix::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let c = Chamber::from_generators(0, [1, 0], [0, 1], a.columns()).unwrap();
        let qp = fit_chamber_qp(&a, &c, &c.lattice).unwrap();
        assert_eq!(qp.max_degree(), Some(0));
        assert_eq!(qp.eval(&[7, 3]), rat(1));
    }

    #[test]
    fn generic_path_with_nonunit_lattice() {
        let a = DegreeMatrix::new(2, vec![vec![2, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let chambers = [
            Chamber::from_generators(0, [2, 0], [1, 1], a.columns()).unwrap(),
            Chamber::from_generators(1, [1, 1], [0, 1], a.columns()).unwrap(),
        ];
        for c in &chambers {
            let qp = fit_chamber_qp(&a, c, &c.lattice).unwrap();
            assert!(qp.max_degree().unwrap_or(0) <= 1);
            for x in 0..25 {
                for y in 0..25 {
                    if c.contains(&[x, y]) {
                        assert_eq!(qp.eval(&[x, y]), BigRational::from_integer(count(&a, &[x, y]).into()));
                    }
                }
            }
        }
    }

    #[test]
    fn repeated_and_zero_degrees() {
        for deg in [&[0i64, 4, 6, 10][..], &[1, 2, 2, 5, 9], &[3, 3, 3, 7], &[0, 0, 1, 1, 5]] {
            let a = DegreeMatrix::bigraded(deg).unwrap();
            for c in chamber_complex_2xn(deg).unwrap() {
                let qp = fit_chamber_qp(&a, &c, &c.lattice).unwrap();
                assert!(qp.max_degree().unwrap_or(0) <= deg.len() - 2);
                for t in 0..30 {
                    for mu in c.lo() * t..=c.hi() * t {
                        let v = BigRational::from_integer(count(&a, &[mu, t]).into());
                        assert_eq!(qp.eval(&[mu, t]), v, "{deg:?} at ({mu},{t})");
                    }
                }
            }
        }
    }

    #[test]
    fn denominators_are_small() {
        let deg = [2, 3, 6];
        let a = DegreeMatrix::bigraded(&deg).unwrap();
        let ch = chamber_complex_2xn(&deg).unwrap();
        let qp = fit_chamber_qp(&a, &ch[1], &ch[1].lattice).unwrap();
        assert!(max_denominator(&qp).unwrap() <= 12);
    }
}
