use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use powerbetti::hilbert::{hf_module_table, series_identity_mismatch, KappaNumerator};
use powerbetti::rees::ToriSpec;
use powerbetti::regions::{eval_betti, region_decomposition, RegionDecomposition};
use powerbetti::vpf::CountTable;

use crate::report::{Check, Witness};

fn witness(point: Vec<i64>, expected: impl ToString, actual: impl ToString) -> Witness {
    Witness {
        point,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

/// Range of `μ` outside which every shifted count vanishes at height `t`.
pub fn mu_range(kappa: &KappaNumerator, degrees: &[i64], t: i64) -> Option<(i64, i64)> {
    let dmin = *degrees.iter().min()?;
    let dmax = *degrees.iter().max()?;
    kappa
        .terms()
        .filter(|(a, _)| a[1] <= t)
        .map(|(a, _)| (a[0] + dmin * (t - a[1]), a[0] + dmax * (t - a[1])))
        .reduce(|x, y| (x.0.min(y.0), x.1.max(y.1)))
}

/// First failure over rows `ts`, scanning rows in parallel and keeping the lowest row.
fn scan_rows<F>(ts: Vec<i64>, row: F) -> (u64, Option<Witness>)
where
    F: Fn(i64) -> (u64, Option<Witness>) + Sync,
{
    let results: Vec<(i64, u64, Option<Witness>)> = ts
        .into_par_iter()
        .map(|t| {
            let (n, w) = row(t);
            (t, n, w)
        })
        .collect();
    let points = results.iter().map(|r| r.1).sum();
    let first = results.into_iter().filter_map(|r| r.2.map(|w| (r.0, w))).min_by_key(|r| r.0);
    (points, first.map(|r| r.1))
}

fn oracle_checks(
    i: usize,
    kappa: &KappaNumerator,
    dec: &RegionDecomposition,
    table: &CountTable,
    tmax: i64,
) -> Vec<Check> {
    let rows: Vec<i64> = (dec.t0..=tmax).collect();
    let grid = |t: i64| -> Option<(i64, i64, i64, i64)> {
        let (l0, lm) = dec.support(t)?;
        Some((l0, lm, l0 - 5, lm + 5))
    };
    let (n_eq, w_eq) = scan_rows(rows.clone(), |t| {
        let Some((_, _, lo, hi)) = grid(t) else {
            return (0, None);
        };
        for mu in lo..=hi {
            let expected = hf_module_table(kappa, table, &[mu, t]);
            match eval_betti(dec, mu, t) {
                Ok(v) if v == expected => {}
                Ok(v) => return (0, Some(witness(vec![mu, t], expected, v))),
                Err(e) => return (0, Some(witness(vec![mu, t], expected, e))),
            }
        }
        ((hi - lo + 1) as u64, None)
    });
    let (n_sup, w_sup) = scan_rows(rows, |t| {
        let Some((l0, lm, lo, hi)) = grid(t) else {
            return (0, None);
        };
        for mu in lo..=hi {
            let oracle = hf_module_table(kappa, table, &[mu, t]);
            let value = eval_betti(dec, mu, t).unwrap_or_else(|_| BigInt::zero());
            let inside = (l0..=lm).contains(&mu);
            if oracle.is_zero() != value.is_zero() || (!inside && !oracle.is_zero()) {
                return (0, Some(witness(vec![mu, t], oracle, value)));
            }
        }
        ((hi - lo + 1) as u64, None)
    });
    vec![
        Check::new("oracle-equivalence", Some(i), n_eq, w_eq),
        Check::new("support", Some(i), n_sup, w_sup),
    ]
}

fn ordering_check(i: usize, dec: &RegionDecomposition) -> Check {
    let mut points = 0;
    for t in dec.t0..=dec.t0 + 20 {
        for (k, w) in dec.lines.windows(2).enumerate() {
            points += 1;
            if w[0].at(t) > w[1].at(t) || w[0].slope > w[1].slope {
                return Check::new(
                    "line-ordering",
                    Some(i),
                    points,
                    Some(witness(
                        vec![k as i64, t],
                        format!("{} <= {}", w[0], w[1]),
                        format!("{} > {}", w[0].at(t), w[1].at(t)),
                    )),
                );
            }
        }
    }
    Check::new("line-ordering", Some(i), points, None)
}

fn nonnegativity_check(i: usize, kappa: &KappaNumerator, degrees: &[i64], table: &CountTable, tmax: i64) -> Check {
    let (points, w) = scan_rows((0..=tmax).collect(), |t| {
        let Some((lo, hi)) = mu_range(kappa, degrees, t) else {
            return (0, None);
        };
        for mu in lo..=hi {
            let v = hf_module_table(kappa, table, &[mu, t]);
            if v.is_negative() {
                return (0, Some(witness(vec![mu, t], ">= 0", v)));
            }
        }
        ((hi - lo + 1).max(0) as u64, None)
    });
    Check::new("nonnegativity", Some(i), points, w)
}

fn series_check(i: usize, kappa: &KappaNumerator, degrees: &[i64], tmax: i64) -> Check {
    let tb = tmax.min(15);
    let dmax = degrees.iter().copied().max().unwrap_or(0);
    let shift = kappa.terms().map(|(a, _)| a[0]).max().unwrap_or(0).max(0);
    let bound = [dmax * tb + shift, tb];
    let points = ((bound[0] + 1) * (bound[1] + 1)) as u64;
    let w = match series_identity_mismatch(kappa, &bound) {
        Ok(None) => None,
        Ok(Some(u)) => Some(witness(u, "product coefficient", "different module value")),
        Err(e) => Some(witness(bound.to_vec(), "valid bound", e)),
    };
    Check::new("series-identity", Some(i), points, w)
}

/// Runs every check on every nonempty Tor entry; returns checks and warnings.
pub fn verify_spec(spec: &ToriSpec, tmax: i64) -> (Vec<Check>, Vec<String>) {
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let table = CountTable::new(&spec.ring(), tmax.max(0) + 1);
    for (i, kappa) in spec.tors() {
        if kappa.is_empty() {
            warnings.push(format!("Tor_{i} has no shifts; nothing to check"));
            continue;
        }
        let dec = match region_decomposition(kappa) {
            Ok(d) => d,
            Err(e) => {
                checks.push(Check::new(
                    "decomposition",
                    Some(i),
                    0,
                    Some(witness(vec![], "a region decomposition", e)),
                ));
                continue;
            }
        };
        if tmax < dec.t0 {
            warnings.push(format!(
                "t-max {tmax} is below t0 = {} for Tor_{i}; stable-range grids are empty",
                dec.t0
            ));
        }
        checks.extend(oracle_checks(i, kappa, &dec, &table, tmax));
        checks.push(ordering_check(i, &dec));
        checks.push(nonnegativity_check(i, kappa, spec.degrees(), &table, tmax));
        checks.push(series_check(i, kappa, spec.degrees(), tmax));
    }
    (checks, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use powerbetti::rees::ci_shifts;

    #[test]
    fn example_passes() {
        let (checks, warnings) = verify_spec(&ci_shifts(&[2, 3, 6]).unwrap(), 15);
        assert!(warnings.is_empty());
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(checks.len(), 15);
    }

    #[test]
    fn empty_range_warns() {
        let (checks, warnings) = verify_spec(&ci_shifts(&[2, 3, 6]).unwrap(), 0);
        assert!(checks.iter().all(|c| c.passed));
        assert!(!warnings.is_empty());
    }

    #[test]
    fn mu_range_of_example() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        assert_eq!(mu_range(s.tor(1).unwrap(), s.degrees(), 3), Some((9, 21)));
        assert_eq!(mu_range(s.tor(1).unwrap(), s.degrees(), 0), None);
    }
}
