//! Eventual region structure of the Betti numbers `dim Tor_i(I^t, k)_μ` of powers of a
//! graded ideal, assembled from shifted chamber quasi-polynomials.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chamber::{chamber_complex_2xn, distinct_degrees, global_lattice};
use crate::error::{Error, Result};
use crate::exactlinalg::{solve_exact, Lattice};
use crate::hilbert::KappaNumerator;
use crate::quasipoly::{fit_chamber_qp, rat, Polynomial, QuasiPolynomial};

/// The half-line `{origin + λ(slope, 1)}`, i.e. `μ = slope·t + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfLine {
    pub slope: i64,
    pub intercept: i64,
    pub origin: [i64; 2],
}

impl HalfLine {
    pub fn through(origin: [i64; 2], slope: i64) -> Self {
        HalfLine {
            slope,
            intercept: origin[0] - slope * origin[1],
            origin,
        }
    }

    pub fn at(&self, t: i64) -> i64 {
        self.slope * t + self.intercept
    }

    fn key(&self) -> (i64, i64, [i64; 2]) {
        (self.slope, self.intercept, self.origin)
    }
}

impl fmt::Display for HalfLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&linear_in_t(self.slope, self.intercept))
    }
}

/// A boundary `μ = slope·t + intercept` between consecutive regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Breakpoint {
    pub slope: i64,
    pub intercept: i64,
}

impl Breakpoint {
    pub fn at(&self, t: i64) -> i64 {
        self.slope * t + self.intercept
    }
}

impl fmt::Display for Breakpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&linear_in_t(self.slope, self.intercept))
    }
}

fn linear_in_t(a: i64, b: i64) -> String {
    let head = match a {
        0 => String::new(),
        1 => "t".to_string(),
        -1 => "-t".to_string(),
        _ => format!("{a}t"),
    };
    match (head.is_empty(), b.cmp(&0)) {
        (true, _) => b.to_string(),
        (false, Ordering::Equal) => head,
        (false, Ordering::Greater) => format!("{head}+{b}"),
        (false, Ordering::Less) => format!("{head}-{}", -b),
    }
}

/// Contribution of one shift of κ inside a region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionTerm {
    pub shift: [i64; 2],
    pub coefficient: i64,
    /// Chamber of `(μ,t) − shift`; `None` for the single-degree grading.
    pub chamber: Option<usize>,
}

/// The points `breaks[lower](t) ≤ μ < breaks[upper](t)` and the quasi-polynomial valid there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lower: usize,
    pub upper: usize,
    pub terms: Vec<RegionTerm>,
    pub piece: QuasiPolynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionDecomposition {
    pub t0: i64,
    pub degrees: Vec<i64>,
    /// All half-lines through the shifts, in stable order for `t ≥ t0`.
    pub lines: Vec<HalfLine>,
    /// Distinct region boundaries in increasing order for `t ≥ t0`.
    pub breaks: Vec<Breakpoint>,
    #[serde(with = "bigint_string")]
    pub modulus: BigInt,
    pub lattice: Lattice,
    pub regions: Vec<Region>,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

fn all_lines(shifts: &[[i64; 2]], e: &[i64]) -> Vec<HalfLine> {
    shifts
        .iter()
        .flat_map(|&s| e.iter().map(move |&a| HalfLine::through(s, a)))
        .collect()
}

/// Smallest `t0 ≥ 1` beyond which no two half-lines through the shifts cross.
pub fn stability_threshold(shifts: &[[i64; 2]], e: &[i64]) -> i64 {
    let lines = all_lines(shifts, e);
    let mut t0 = 1i64;
    for (i, l1) in lines.iter().enumerate() {
        for l2 in &lines[i + 1..] {
            if l1.slope != l2.slope {
                let y = Integer::div_ceil(&(l2.intercept - l1.intercept), &(l1.slope - l2.slope));
                t0 = t0.max(y);
            }
        }
    }
    t0
}

/// Half-lines ordered by value at `t0 + 1`, ties by slope, intercept and origin.
pub fn sort_lines(shifts: &[[i64; 2]], e: &[i64], t0: i64) -> Vec<HalfLine> {
    let mut lines = all_lines(shifts, e);
    lines.sort_by_key(|l| (l.at(t0 + 1), l.key()));
    lines.dedup();
    lines
}

fn kappa_shifts(kappa: &KappaNumerator) -> Result<Vec<([i64; 2], i64)>> {
    kappa
        .terms()
        .map(|(a, c)| match a {
            [x, y] => Ok(([*x, *y], c)),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                actual: a.len(),
            }),
        })
        .collect()
}

/// Region decomposition of the module presented by `kappa` over a bigraded ring with
/// generator degrees `(d_i, 1)`.
pub fn region_decomposition(kappa: &KappaNumerator) -> Result<RegionDecomposition> {
    let degrees = kappa.ring().bigraded_degrees().ok_or_else(|| {
        Error::InvalidGrading("region decomposition needs degrees of the form (d, 1)".into())
    })?;
    let mut sorted = degrees.clone();
    sorted.sort_unstable();
    let terms = kappa_shifts(kappa)?;
    match distinct_degrees(&sorted) {
        Ok(e) => decompose(&sorted, &e, &terms),
        Err(Error::DegenerateGrading(_)) => decompose_single(&sorted, &terms),
        Err(err) => Err(err),
    }
}

fn sort_breaks(mut breaks: Vec<Breakpoint>, t0: i64) -> Vec<Breakpoint> {
    breaks.sort_by_key(|b| (b.at(t0 + 1), *b));
    breaks.dedup();
    breaks
}

fn decompose(degrees: &[i64], e: &[i64], terms: &[([i64; 2], i64)]) -> Result<RegionDecomposition> {
    let ring = crate::vpf::DegreeMatrix::bigraded(degrees)?;
    let lattice = global_lattice(degrees)?;
    let chambers = chamber_complex_2xn(degrees)?;
    let chamber_qps = chambers
        .iter()
        .map(|c| fit_chamber_qp(&ring, c, &lattice))
        .collect::<Result<Vec<_>>>()?;
    let shifts: Vec<[i64; 2]> = terms.iter().map(|t| t.0).collect();
    let t0 = stability_threshold(&shifts, e);
    let lines = sort_lines(&shifts, e, t0);
    let emax = *e.last().expect("two degrees");
    let effective = |slope: i64, intercept: i64| Breakpoint {
        slope,
        intercept: intercept + i64::from(slope == emax),
    };
    let breaks = sort_breaks(
        lines.iter().map(|l| effective(l.slope, l.intercept)).collect(),
        t0,
    );
    let position = |b: Breakpoint| breaks.binary_search_by_key(&(b.at(t0 + 1), b), |x| (x.at(t0 + 1), *x)).expect("break listed");
    let term_breaks: Vec<Vec<usize>> = shifts
        .iter()
        .map(|&s| {
            e.iter()
                .map(|&a| {
                    let l = HalfLine::through(s, a);
                    position(effective(l.slope, l.intercept))
                })
                .collect()
        })
        .collect();
    let mut regions = Vec::new();
    for i in 0..breaks.len().saturating_sub(1) {
        let mut piece = QuasiPolynomial::zero(lattice.clone());
        let mut rterms = Vec::new();
        for (k, &(shift, c)) in terms.iter().enumerate() {
            let crossed = term_breaks[k].iter().filter(|&&p| p <= i).count();
            if crossed == 0 || crossed == e.len() {
                continue;
            }
            let chamber = crossed - 1;
            piece = piece.add(&chamber_qps[chamber].shift(&shift, &rat(c)))?;
            rterms.push(RegionTerm {
                shift,
                coefficient: c,
                chamber: Some(chamber),
            });
        }
        regions.push(Region {
            lower: i,
            upper: i + 1,
            terms: rterms,
            piece,
        });
    }
    Ok(RegionDecomposition {
        t0,
        degrees: degrees.to_vec(),
        lines,
        breaks,
        modulus: lattice.det().clone(),
        lattice,
        regions,
    })
}

/// `C(t − s + n − 1, n − 1)` as a polynomial in `(μ, t)`.
fn shifted_binomial(s: i64, n: usize) -> Polynomial {
    let t = Polynomial::var(2, 1);
    let mut p = Polynomial::constant(2, BigRational::one());
    for j in 1..n as i64 {
        let mut f = t.clone();
        f.add_term(vec![0, 0], rat(j - s));
        p = p.mul(&f).scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
    }
    p
}

fn decompose_single(degrees: &[i64], terms: &[([i64; 2], i64)]) -> Result<RegionDecomposition> {
    let d = degrees[0];
    let n = degrees.len();
    let t0 = terms.iter().map(|t| t.0[1]).max().unwrap_or(0).max(1);
    let mut lines: Vec<HalfLine> = terms.iter().map(|t| HalfLine::through(t.0, d)).collect();
    lines.sort_by_key(|l| l.key());
    lines.dedup();
    let breaks = sort_breaks(
        lines
            .iter()
            .flat_map(|l| {
                [
                    Breakpoint {
                        slope: d,
                        intercept: l.intercept,
                    },
                    Breakpoint {
                        slope: d,
                        intercept: l.intercept + 1,
                    },
                ]
            })
            .collect(),
        t0,
    );
    let lattice = Lattice::standard(2);
    let mut regions = Vec::new();
    for (i, w) in breaks.windows(2).enumerate() {
        let mut poly = Polynomial::zero(2);
        let mut rterms = Vec::new();
        for &(shift, c) in terms {
            if shift[0] - d * shift[1] == w[0].intercept {
                poly.add_assign(&shifted_binomial(shift[1], n).scale(&rat(c)));
                rterms.push(RegionTerm {
                    shift,
                    coefficient: c,
                    chamber: None,
                });
            }
        }
        regions.push(Region {
            lower: i,
            upper: i + 1,
            terms: rterms,
            piece: QuasiPolynomial::from_polynomial(lattice.clone(), poly),
        });
    }
    Ok(RegionDecomposition {
        t0,
        degrees: degrees.to_vec(),
        lines,
        breaks,
        modulus: BigInt::one(),
        lattice,
        regions,
    })
}

impl RegionDecomposition {
    /// Region containing `(μ, t)`, if any.
    pub fn region_at(&self, mu: i64, t: i64) -> Option<&Region> {
        let (first, last) = (self.breaks.first()?, self.breaks.last()?);
        if mu < first.at(t) || mu >= last.at(t) {
            return None;
        }
        let i = self.breaks.partition_point(|b| b.at(t) <= mu) - 1;
        self.regions.get(i)
    }

    /// `[L_0(t), L_m(t)]`, the closed range of `μ` outside which the value is zero.
    pub fn support(&self, t: i64) -> Option<(i64, i64)> {
        Some((self.breaks.first()?.at(t), self.breaks.last()?.at(t) - 1))
    }
}

/// Value of the decomposition at `(μ, t)`; requires `t ≥ t0`.
pub fn eval_betti(dec: &RegionDecomposition, mu: i64, t: i64) -> Result<BigInt> {
    if t < dec.t0 {
        return Err(Error::PreStableRange { t, t0: dec.t0 });
    }
    let Some(r) = dec.region_at(mu, t) else {
        return Ok(BigInt::zero());
    };
    let v = r.piece.eval(&[mu, t]);
    if !v.is_integer() {
        return Err(Error::InvalidData(format!("non-integral value {v} at ({mu},{t})")));
    }
    Ok(v.to_integer())
}

fn total_at(dec: &RegionDecomposition, t: i64) -> Result<BigInt> {
    let Some((lo, hi)) = dec.support(t) else {
        return Ok(BigInt::zero());
    };
    let mut s = BigInt::zero();
    for mu in lo..=hi {
        s += eval_betti(dec, mu, t)?;
    }
    Ok(s)
}

/// The polynomial `P(t) = Σ_μ β(μ, t)` for `t ≥ t0`, as a polynomial in one variable.
pub fn total_betti_polynomial(dec: &RegionDecomposition) -> Result<Polynomial> {
    let deg = dec.degrees.len().saturating_sub(1);
    let ts: Vec<i64> = (dec.t0..=dec.t0 + deg as i64 + 1).collect();
    let m: Vec<Vec<BigRational>> = ts
        .iter()
        .map(|&t| (0..=deg as u32).map(|p| BigRational::from_integer(BigInt::from(t).pow(p))).collect())
        .collect();
    let b = ts
        .iter()
        .map(|&t| total_at(dec, t).map(BigRational::from_integer))
        .collect::<Result<Vec<_>>>()?;
    let sol = solve_exact(&m, &b).ok_or(Error::InterpolationInconsistent {
        chamber: 0,
        max_degree: deg,
    })?;
    let p = Polynomial::from_terms(1, sol.into_iter().enumerate().map(|(i, c)| (vec![i as u32], c)));
    let start = *ts.last().expect("nonempty") + 1;
    for t in start..start + 6 {
        let expected = total_at(dec, t)?;
        let fitted = p.eval(&[t]);
        if fitted != BigRational::from_integer(expected.clone()) {
            return Err(Error::ValidationFailed {
                point: vec![t],
                expected: expected.to_string(),
                fitted: fitted.to_string(),
            });
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::hf_module;
    use crate::vpf::DegreeMatrix;

    fn ring() -> DegreeMatrix {
        DegreeMatrix::bigraded(&[2, 3, 6]).unwrap()
    }

    fn kappa(terms: &[([i64; 2], i64)]) -> KappaNumerator {
        KappaNumerator::new(ring(), terms.iter().map(|(a, c)| (a.to_vec(), *c))).unwrap()
    }

    fn tor1() -> KappaNumerator {
        kappa(&[([5, 1], 1), ([8, 1], 1), ([9, 1], 1), ([11, 2], -1)])
    }

    const TOR1_SHIFTS: [[i64; 2]; 4] = [[5, 1], [8, 1], [9, 1], [11, 2]];

    #[test]
    fn example_threshold() {
        assert_eq!(stability_threshold(&TOR1_SHIFTS, &[2, 3, 6]), 5);
        assert_eq!(stability_threshold(&[[0, 0]], &[2, 3, 6]), 1);
    }

    #[test]
    fn example_line_order() {
        let lines = sort_lines(&TOR1_SHIFTS, &[2, 3, 6], 5);
        let got: Vec<(i64, i64)> = lines.iter().map(|l| (l.slope, l.intercept)).collect();
        assert_eq!(
            got,
            vec![
                (2, 3),
                (2, 6),
                (2, 7),
                (2, 7),
                (3, 2),
                (3, 5),
                (3, 5),
                (3, 6),
                (6, -1),
                (6, -1),
                (6, 2),
                (6, 3)
            ]
        );
        let single = sort_lines(&[[0, 0]], &[2, 3, 6], 1);
        assert_eq!(single.iter().map(|l| l.to_string()).collect::<Vec<_>>(), ["2t", "3t", "6t"]);
    }

    #[test]
    fn coincident_lines_are_kept() {
        let lines = sort_lines(&[[4, 1], [7, 2]], &[3, 5], 1);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].intercept, lines[1].intercept);
        assert!(lines[0].origin < lines[1].origin);
    }

    #[test]
    fn tor0_has_two_regions() {
        let dec = region_decomposition(&KappaNumerator::unit(ring())).unwrap();
        assert_eq!(dec.regions.len(), 2);
        let bs: Vec<String> = dec.breaks.iter().map(|b| b.to_string()).collect();
        assert_eq!(bs, ["2t", "3t", "6t+1"]);
        assert_eq!(dec.modulus, BigInt::from(12));
    }

    #[test]
    fn tor1_regions_match_table() {
        let dec = region_decomposition(&tor1()).unwrap();
        assert_eq!(dec.t0, 5);
        let bs: Vec<String> = dec.breaks.iter().map(|b| b.to_string()).collect();
        assert_eq!(
            bs,
            ["2t+3", "2t+6", "2t+7", "3t+2", "3t+5", "3t+6", "6t", "6t+3", "6t+4"]
        );
        let chambers: Vec<Vec<(usize, i64)>> = dec
            .regions
            .iter()
            .map(|r| {
                r.terms
                    .iter()
                    .map(|x| (x.chamber.unwrap(), x.coefficient))
                    .collect()
            })
            .collect();
        assert_eq!(chambers[2], vec![(0, 1), (0, 1), (0, 1), (0, -1)]);
        assert_eq!(chambers[6], vec![(1, 1), (1, 1)]);
        assert_eq!(eval_betti(&dec, 28, 10).unwrap(), BigInt::from(3));
        assert_eq!(eval_betti(&dec, 22, 10).unwrap(), BigInt::zero());
    }

    #[test]
    fn tor2_example_value() {
        let dec = region_decomposition(&kappa(&[([11, 1], 1)])).unwrap();
        let bs: Vec<String> = dec.breaks.iter().map(|b| b.to_string()).collect();
        assert_eq!(bs, ["2t+9", "3t+8", "6t+6"]);
        assert_eq!(dec.t0, 1);
        assert_eq!(eval_betti(&dec, 16, 3).unwrap(), BigInt::one());
    }

    #[test]
    fn below_threshold_rejected() {
        let dec = region_decomposition(&tor1()).unwrap();
        assert_eq!(
            eval_betti(&dec, 20, 4).unwrap_err(),
            Error::PreStableRange { t: 4, t0: 5 }
        );
    }

    #[test]
    fn oracle_equivalence() {
        for k in [KappaNumerator::unit(ring()), tor1(), kappa(&[([11, 1], 1)])] {
            let dec = region_decomposition(&k).unwrap();
            let (l0, lm) = (dec.breaks[0], *dec.breaks.last().unwrap());
            for t in dec.t0..=25 {
                for mu in l0.at(t) - 5..=lm.at(t) + 5 {
                    assert_eq!(eval_betti(&dec, mu, t).unwrap(), hf_module(&k, &[mu, t]), "({mu},{t})");
                }
            }
        }
    }

    #[test]
    fn total_betti_polynomials() {
        let t = |k: &KappaNumerator, at: i64| {
            total_betti_polynomial(&region_decomposition(k).unwrap()).unwrap().eval(&[at])
        };
        assert_eq!(t(&KappaNumerator::unit(ring()), 10), rat(66));
        assert_eq!(t(&kappa(&[([11, 1], 1)]), 3), rat(6));
        let zero = KappaNumerator::new(ring(), []).unwrap();
        let p = total_betti_polynomial(&region_decomposition(&zero).unwrap()).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn single_degree_grading() {
        let ring = DegreeMatrix::bigraded(&[2, 2, 2]).unwrap();
        let k = KappaNumerator::new(ring, [(vec![0, 0], 1), (vec![3, 1], -1), (vec![4, 2], 2)]).unwrap();
        let dec = region_decomposition(&k).unwrap();
        for t in dec.t0..20 {
            for mu in 2 * t - 4..2 * t + 6 {
                assert_eq!(eval_betti(&dec, mu, t).unwrap(), hf_module(&k, &[mu, t]), "({mu},{t})");
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let dec = region_decomposition(&tor1()).unwrap();
        let s = serde_json::to_string(&dec).unwrap();
        let back: RegionDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, dec);
    }

    #[test]
    fn linear_formatting() {
        assert_eq!(linear_in_t(2, -3), "2t-3");
        assert_eq!(linear_in_t(0, 4), "4");
        assert_eq!(linear_in_t(1, 0), "t");
    }
}
