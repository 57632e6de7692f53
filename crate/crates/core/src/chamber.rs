//! Chamber complex of `Pos(A)` for bigraded matrices `[[d_1..d_n],[1..1]]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlinalg::Lattice;

/// A maximal chamber `cone{(lo,1),(hi,1)}` between consecutive distinct degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chamber {
    /// Position in the slope-ordered chamber list.
    pub index: usize,
    /// Extremal rays `(lo, 1)` and `(hi, 1)`.
    pub generators: [[i64; 2]; 2],
    /// Linear forms `H1 = μ − lo·t` and `H2 = hi·t − μ` as coefficient pairs on `(μ, t)`.
    pub inequalities: [[i64; 2]; 2],
    /// Two-element column sets `σ = {i, j}` with `C ⊆ Pos(A_σ)`. Larger sets only
    /// enlarge `Λ_σ`, so these determine `Λ_C`.
    pub index_set: Vec<[usize; 2]>,
    /// The chamber lattice `Λ_C`.
    pub lattice: Lattice,
}

impl Chamber {
    /// The closed cone spanned by `g1` and `g2` in a two-dimensional grading with the
    /// given columns. Inequalities are primitive and vanish on the respective rays.
    pub fn from_generators(index: usize, g1: [i64; 2], g2: [i64; 2], columns: &[Vec<i64>]) -> Result<Self> {
        let det = |a: [i64; 2], b: &[i64]| a[0] * b[1] - a[1] * b[0];
        if det(g1, &g2) == 0 {
            return Err(Error::DegenerateGrading(format!(
                "chamber generators {g1:?} and {g2:?} are parallel"
            )));
        }
        let form = |g: [i64; 2], other: [i64; 2]| {
            // x ↦ det[g | x], oriented to be positive on the other ray
            let mut h = [-g[1], g[0]];
            if h[0] * other[0] + h[1] * other[1] < 0 {
                h = [-h[0], -h[1]];
            }
            let gcd = num_integer::gcd(h[0], h[1]);
            [h[0] / gcd, h[1] / gcd]
        };
        let inequalities = [form(g1, g2), form(g2, g1)];
        let in_cone = |a: &[i64], b: &[i64], x: [i64; 2]| {
            let d = a[0] * b[1] - a[1] * b[0];
            let s = x[0] * b[1] - x[1] * b[0];
            let t = a[0] * x[1] - a[1] * x[0];
            d != 0 && (s * d.signum() >= 0) && (t * d.signum() >= 0)
        };
        let mut index_set = Vec::new();
        let mut pairs: Vec<[Vec<i64>; 2]> = Vec::new();
        for (i, a) in columns.iter().enumerate() {
            for (j, b) in columns.iter().enumerate().skip(i + 1) {
                if in_cone(a, b, g1) && in_cone(a, b, g2) {
                    index_set.push([i, j]);
                    let mut key = [a.clone(), b.clone()];
                    key.sort();
                    pairs.push(key);
                }
            }
        }
        if index_set.is_empty() {
            return Err(Error::InvalidGrading(format!(
                "cone{{{g1:?}, {g2:?}}} is not contained in the cone of the columns"
            )));
        }
        pairs.sort();
        pairs.dedup();
        let lattices = pairs
            .iter()
            .map(|[a, b]| Lattice::from_columns(&[a, b]))
            .collect::<Result<Vec<_>>>()?;
        let lattice = Lattice::intersect_all(&lattices)?;
        Ok(Chamber {
            index,
            generators: [g1, g2],
            inequalities,
            index_set,
            lattice,
        })
    }

    pub fn lo(&self) -> i64 {
        self.generators[0][0]
    }

    pub fn hi(&self) -> i64 {
        self.generators[1][0]
    }

    pub fn eval_inequalities(&self, u: &[i64]) -> [i64; 2] {
        let f = |h: &[i64; 2]| h[0] * u[0] + h[1] * u[1];
        [f(&self.inequalities[0]), f(&self.inequalities[1])]
    }

    /// Membership in the closed cone.
    pub fn contains(&self, u: &[i64]) -> bool {
        let [a, b] = self.eval_inequalities(u);
        a >= 0 && b >= 0
    }

    /// Membership in the open cone.
    pub fn contains_interior(&self, u: &[i64]) -> bool {
        let [a, b] = self.eval_inequalities(u);
        a > 0 && b > 0
    }

    /// Human-readable inequalities, e.g. `mu - 2t >= 0, 3t - mu >= 0`.
    pub fn describe(&self) -> String {
        let [h1, h2] = self.inequalities;
        format!("{} >= 0, {} >= 0", linear_form(h1), linear_form(h2))
    }
}

fn linear_form(h: [i64; 2]) -> String {
    let term = |c: i64, name: &str| match c {
        1 => name.to_string(),
        c => format!("{}{name}", c.abs()),
    };
    let mut parts: Vec<(bool, String)> = Vec::new();
    // positive terms first so "3t - mu" reads naturally
    let mut items = [(h[0], "mu"), (h[1], "t")];
    items.sort_by_key(|(c, _)| *c < 0);
    for (c, name) in items {
        if c != 0 {
            parts.push((c < 0, term(c.abs(), name)));
        }
    }
    let mut out = String::new();
    for (k, (neg, s)) in parts.into_iter().enumerate() {
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&s);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Sorted distinct degrees, after checking the input is a nondecreasing list of
/// nonnegative integers with at least two distinct values.
pub fn distinct_degrees(degrees: &[i64]) -> Result<Vec<i64>> {
    if degrees.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidGrading("degrees must be nondecreasing".into()));
    }
    if degrees.iter().any(|&d| d < 0) {
        return Err(Error::InvalidGrading("degrees must be nonnegative".into()));
    }
    let mut e = degrees.to_vec();
    e.dedup();
    if e.len() < 2 {
        return Err(Error::DegenerateGrading(format!(
            "need at least two distinct degrees, got {degrees:?}"
        )));
    }
    Ok(e)
}

/// `Λ_{ij} = span{(a,1),(b,1)}` for `a ≠ b`.
pub fn pair_lattice(a: i64, b: i64) -> Lattice {
    Lattice::from_columns(&[[a, 1], [b, 1]]).expect("distinct degrees span Z^2 ⊗ Q")
}

/// One chamber per consecutive pair of distinct degrees, ordered by slope.
pub fn chamber_complex_2xn(degrees: &[i64]) -> Result<Vec<Chamber>> {
    let e = distinct_degrees(degrees)?;
    let columns: Vec<Vec<i64>> = degrees.iter().map(|&d| vec![d, 1]).collect();
    e.windows(2)
        .enumerate()
        .map(|(index, w)| Chamber::from_generators(index, [w[0], 1], [w[1], 1], &columns))
        .collect()
}

/// Indices of all chambers whose closure contains `u`.
pub fn locate(chambers: &[Chamber], u: &[i64]) -> Vec<usize> {
    chambers
        .iter()
        .filter(|c| c.contains(u))
        .map(|c| c.index)
        .collect()
}

/// `Λ = ⋂_{i<j} Λ_{ij}` over all pairs of distinct degrees.
pub fn global_lattice(degrees: &[i64]) -> Result<Lattice> {
    let e = distinct_degrees(degrees)?;
    let mut lattices = Vec::new();
    for (i, &a) in e.iter().enumerate() {
        for &b in &e[i + 1..] {
            lattices.push(pair_lattice(a, b));
        }
    }
    Lattice::intersect_all(&lattices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vpf::{in_pos_cone_int, DegreeMatrix};
    use num_bigint::BigInt;

    #[test]
    fn four_degree_complex() {
        let c = chamber_complex_2xn(&[2, 3, 6, 7]).unwrap();
        let gens: Vec<_> = c.iter().map(|c| c.generators).collect();
        assert_eq!(
            gens,
            vec![[[2, 1], [3, 1]], [[3, 1], [6, 1]], [[6, 1], [7, 1]]]
        );
    }

    #[test]
    fn example_chambers_and_inequalities() {
        let c = chamber_complex_2xn(&[2, 3, 6]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].inequalities, [[1, -2], [-1, 3]]);
        assert_eq!(c[1].inequalities, [[1, -3], [-1, 6]]);
        assert_eq!(c[0].describe(), "mu - 2t >= 0, 3t - mu >= 0");
        assert_eq!(c[1].describe(), "mu - 3t >= 0, 6t - mu >= 0");
        assert_eq!(c[0].index_set, vec![[0, 1], [0, 2]]);
        assert_eq!(c[1].index_set, vec![[0, 2], [1, 2]]);
        assert_eq!(c[0].lattice.det(), &BigInt::from(4));
        assert_eq!(c[1].lattice.det(), &BigInt::from(12));
    }

    #[test]
    fn duplicates_collapse() {
        let c = chamber_complex_2xn(&[5, 5, 5, 9]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].generators, [[5, 1], [9, 1]]);
        assert_eq!(c[0].index_set.len(), 3);
    }

    #[test]
    fn degenerate_and_unsorted_inputs() {
        assert!(matches!(
            chamber_complex_2xn(&[4, 4]),
            Err(Error::DegenerateGrading(_))
        ));
        assert!(matches!(
            chamber_complex_2xn(&[3, 2]),
            Err(Error::InvalidGrading(_))
        ));
        assert!(matches!(global_lattice(&[7]), Err(Error::DegenerateGrading(_))));
    }

    #[test]
    fn general_generators() {
        let cols = vec![vec![1, 0], vec![0, 1]];
        let c = Chamber::from_generators(0, [1, 0], [0, 1], &cols).unwrap();
        assert_eq!(c.inequalities, [[0, 1], [1, 0]]);
        assert_eq!(c.describe(), "t >= 0, mu >= 0");
        assert_eq!(c.lattice.det(), &BigInt::from(1));
        assert!(Chamber::from_generators(0, [1, 0], [2, 0], &cols).is_err());
        assert!(Chamber::from_generators(0, [1, 0], [-1, 1], &cols).is_err());
    }

    #[test]
    fn locate_examples() {
        let c = chamber_complex_2xn(&[2, 3, 6]).unwrap();
        assert_eq!(locate(&c, &[7, 3]), vec![0]);
        assert_eq!(locate(&c, &[9, 3]), vec![0, 1]);
        assert!(locate(&c, &[1, 1]).is_empty());
        assert!(locate(&c, &[-6, -1]).is_empty());
    }

    #[test]
    fn global_lattice_examples() {
        assert_eq!(global_lattice(&[2, 3, 6]).unwrap().det(), &BigInt::from(12));
        assert_eq!(global_lattice(&[1, 2]).unwrap().det(), &BigInt::from(1));
        assert_eq!(global_lattice(&[2, 4]).unwrap().det(), &BigInt::from(2));
    }

    #[test]
    fn chambers_tile_the_cone() {
        for deg in [&[2i64, 3, 6][..], &[0, 4, 6, 10], &[1, 2, 2, 5, 9], &[3, 3, 8]] {
            let c = chamber_complex_2xn(deg).unwrap();
            let a = DegreeMatrix::bigraded(deg).unwrap();
            let global = global_lattice(deg).unwrap();
            for ch in &c {
                assert!(global.is_sublattice_of(&ch.lattice));
                for &e in deg {
                    assert!(!ch.contains_interior(&[e, 1]));
                }
            }
            for t in 0..12 {
                for mu in -3..12 * t + 3 {
                    let u = [mu, t];
                    let closures = locate(&c, &u).len();
                    let interiors = c.iter().filter(|ch| ch.contains_interior(&u)).count();
                    assert_eq!(closures > 0, in_pos_cone_int(&a, &u), "{u:?}");
                    assert!(interiors <= 1);
                }
            }
        }
    }

    #[test]
    fn pair_lattices_have_gap_determinant() {
        let deg = [0i64, 1, 4, 6, 9, 15];
        for &a in &deg {
            for &b in &deg {
                if a != b {
                    assert_eq!(pair_lattice(a, b).det(), &BigInt::from((a - b).abs()));
                }
            }
        }
    }
}
