//! Shift data of the Tor modules of a Rees algebra: generated for complete
//! intersections of two or three forms, or read from a JSON document.
//!
//! Document layout:
//!
//! ```json
//! {
//!   "generators": [[2, 1], [3, 1], [6, 1]],
//!   "tor": [
//!     { "index": 0, "shifts": [{ "a": [0, 0], "c": 1 }] },
//!     { "index": 1, "shifts": [{ "a": [5, 1], "c": 1 }, { "a": [11, 2], "c": -1 }] }
//!   ]
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::KappaNumerator;
use crate::vpf::DegreeMatrix;

/// Generator degrees of an ideal and the κ numerator of each `Tor_i(R_I, k)` over
/// `k[T_1..T_r]`, `deg T_j = (d_j, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToriSpec {
    degrees: Vec<i64>,
    tors: BTreeMap<usize, KappaNumerator>,
}

impl ToriSpec {
    pub fn new(degrees: Vec<i64>, tors: BTreeMap<usize, KappaNumerator>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidData("no generators".into()));
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidData(format!("generator degrees {degrees:?} are not sorted")));
        }
        let ring = DegreeMatrix::bigraded(&degrees)?;
        for (i, k) in &tors {
            if k.ring() != &ring {
                return Err(Error::InvalidData(format!("Tor_{i} lives over a different ring")));
            }
            if let Some((a, _)) = k.terms().find(|(a, _)| a[1] < 0) {
                return Err(Error::InvalidData(format!(
                    "Tor_{i} has shift {a:?} of negative T-degree"
                )));
            }
        }
        Ok(ToriSpec { degrees, tors })
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn ring(&self) -> DegreeMatrix {
        DegreeMatrix::bigraded(&self.degrees).expect("validated")
    }

    pub fn tor(&self, i: usize) -> Option<&KappaNumerator> {
        self.tors.get(&i)
    }

    pub fn tors(&self) -> impl Iterator<Item = (usize, &KappaNumerator)> + '_ {
        self.tors.iter().map(|(&i, k)| (i, k))
    }

    /// `Σ_i (−1)^i κ_i`, the numerator of the Hilbert series of `R_I` itself.
    pub fn euler_kappa(&self) -> KappaNumerator {
        self.tors
            .iter()
            .map(|(&i, k)| k.scale(if i % 2 == 0 { 1 } else { -1 }))
            .fold(KappaNumerator::new(self.ring(), []).expect("empty"), |acc, k| {
                acc.add(&k).expect("same ring")
            })
    }
}

/// Shift data of the Rees algebra of a complete intersection of 2 or 3 forms.
pub fn ci_shifts(degrees: &[i64]) -> Result<ToriSpec> {
    let mut d = degrees.to_vec();
    d.sort_unstable();
    if d.iter().any(|&x| x <= 0) {
        return Err(Error::InvalidGrading("generator degrees must be positive".into()));
    }
    let ring = DegreeMatrix::bigraded(&d)?;
    let kappa = |terms: Vec<([i64; 2], i64)>| {
        KappaNumerator::new(ring.clone(), terms.into_iter().map(|(a, c)| (a.to_vec(), c)))
    };
    let mut tors = BTreeMap::new();
    tors.insert(0, KappaNumerator::unit(ring.clone()));
    match d[..] {
        [d1, d2] => {
            tors.insert(1, kappa(vec![([d1 + d2, 1], 1)])?);
        }
        [d1, d2, d3] => {
            tors.insert(
                1,
                kappa(vec![
                    ([d2 + d3, 1], 1),
                    ([d1 + d3, 1], 1),
                    ([d1 + d2, 1], 1),
                    ([d1 + d2 + d3, 2], -1),
                ])?,
            );
            tors.insert(2, kappa(vec![([d1 + d2 + d3, 1], 1)])?);
        }
        _ => return Err(Error::UnsupportedRank(d.len())),
    }
    ToriSpec::new(d, tors)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    generators: Vec<[i64; 2]>,
    tor: Vec<TorEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorEntry {
    index: usize,
    shifts: Vec<ShiftEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftEntry {
    a: [i64; 2],
    c: i64,
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates a shift-data document.
pub fn ingest(document: &str) -> Result<ToriSpec> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let mut degrees = Vec::with_capacity(doc.generators.len());
    for (j, g) in doc.generators.iter().enumerate() {
        if g[1] != 1 {
            return Err(invalid(&format!("generators[{j}]"), "generator bidegree must be (d, 1)"));
        }
        if g[0] <= 0 {
            return Err(invalid(&format!("generators[{j}]"), "generator degree must be positive"));
        }
        degrees.push(g[0]);
    }
    if degrees.is_empty() {
        return Err(invalid("generators", "at least one generator is required"));
    }
    if let Some(j) = degrees.windows(2).position(|w| w[0] > w[1]) {
        return Err(invalid(
            &format!("generators[{}]", j + 1),
            "generator degrees must be sorted in nondecreasing order",
        ));
    }
    let ring = DegreeMatrix::bigraded(&degrees)?;
    let mut grouped: BTreeMap<usize, Vec<(Vec<i64>, i64)>> = BTreeMap::new();
    for (i, entry) in doc.tor.iter().enumerate() {
        for (j, s) in entry.shifts.iter().enumerate() {
            if s.a[1] < 0 {
                return Err(invalid(
                    &format!("tor[{i}].shifts[{j}].a"),
                    "shift has negative T-degree",
                ));
            }
        }
        grouped
            .entry(entry.index)
            .or_default()
            .extend(entry.shifts.iter().map(|s| (s.a.to_vec(), s.c)));
    }
    let tors = grouped
        .into_iter()
        .map(|(i, terms)| Ok((i, KappaNumerator::new(ring.clone(), terms)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    ToriSpec::new(degrees, tors)
}

/// Inverse of [`ingest`].
pub fn serialize(spec: &ToriSpec) -> String {
    let doc = Document {
        generators: spec.degrees.iter().map(|&d| [d, 1]).collect(),
        tor: spec
            .tors
            .iter()
            .map(|(&index, k)| TorEntry {
                index,
                shifts: k
                    .terms()
                    .map(|(a, c)| ShiftEntry { a: [a[0], a[1]], c })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{hf_module, series_identity_check};
    use num_bigint::BigInt;
    use num_traits::Signed;

    #[test]
    fn example_shifts() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        let t1: Vec<(Vec<i64>, i64)> = s.tor(1).unwrap().terms().map(|(a, c)| (a.to_vec(), c)).collect();
        assert_eq!(
            t1,
            vec![(vec![5, 1], 1), (vec![8, 1], 1), (vec![9, 1], 1), (vec![11, 2], -1)]
        );
        let t2: Vec<(Vec<i64>, i64)> = s.tor(2).unwrap().terms().map(|(a, c)| (a.to_vec(), c)).collect();
        assert_eq!(t2, vec![(vec![11, 1], 1)]);
        assert_eq!(s.tor(0).unwrap(), &KappaNumerator::unit(s.ring()));
    }

    #[test]
    fn two_generators() {
        let s = ci_shifts(&[1, 1]).unwrap();
        assert_eq!(s.tor(1).unwrap().coefficient(&[2, 1]), 1);
        assert_eq!(s.tor(1).unwrap().len(), 1);
        assert!(s.tor(2).is_none());
    }

    #[test]
    fn unsupported_ranks() {
        assert_eq!(ci_shifts(&[1, 2, 3, 4]).unwrap_err(), Error::UnsupportedRank(4));
        assert_eq!(ci_shifts(&[5]).unwrap_err(), Error::UnsupportedRank(1));
        assert!(ci_shifts(&[0, 2]).is_err());
    }

    #[test]
    fn euler_numerator() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        let expect = KappaNumerator::new(
            s.ring(),
            [
                (vec![0, 0], 1),
                (vec![5, 1], -1),
                (vec![8, 1], -1),
                (vec![9, 1], -1),
                (vec![11, 1], 1),
                (vec![11, 2], 1),
            ],
        )
        .unwrap();
        assert_eq!(s.euler_kappa(), expect);
        assert!(series_identity_check(&expect, &[40, 6]).unwrap());
    }

    #[test]
    fn ci_values_are_nonnegative() {
        for deg in [&[2i64, 3, 6][..], &[1, 1], &[2, 3], &[1, 2, 2], &[3, 4, 5]] {
            let s = ci_shifts(deg).unwrap();
            for (_, k) in s.tors() {
                for t in 0..=12 {
                    for mu in 0..=deg.iter().sum::<i64>() * (t + 2) {
                        assert!(!hf_module(k, &[mu, t]).is_negative(), "{deg:?} ({mu},{t})");
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        assert_eq!(ingest(&serialize(&s)).unwrap(), s);
    }

    #[test]
    fn duplicate_shifts_merge() {
        let doc = r#"{"generators":[[2,1],[3,1]],"tor":[{"index":1,"shifts":[{"a":[5,1],"c":1},{"a":[5,1],"c":1}]}]}"#;
        let s = ingest(doc).unwrap();
        assert_eq!(s.tor(1).unwrap().coefficient(&[5, 1]), 2);
    }

    #[test]
    fn malformed_coefficient_names_field() {
        let doc = r#"{"generators":[[2,1],[3,1]],"tor":[{"index":1,"shifts":[{"a":[5,1],"c":"one"}]}]}"#;
        match ingest(doc).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "tor[0].shifts[0].c"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            (r#"{"generators":[[3,1],[2,1]],"tor":[]}"#, "generators[1]"),
            (r#"{"generators":[[2,1]],"tor":[{"index":0,"shifts":[{"a":[1,-1],"c":1}]}]}"#, "tor[0].shifts[0].a"),
            (r#"{"generators":[[2,1]],"tor":[],"extra":1}"#, "extra"),
            (r#"{"generators":[[2,2]],"tor":[]}"#, "generators[0]"),
        ];
        for (doc, want) in cases {
            match ingest(doc).unwrap_err() {
                Error::Parse { path, .. } => assert_eq!(path, want, "{doc}"),
                e => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn example_tor2_is_shifted_count() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        let k = s.tor(2).unwrap();
        assert_eq!(hf_module(k, &[16, 3]), BigInt::from(1));
    }
}
