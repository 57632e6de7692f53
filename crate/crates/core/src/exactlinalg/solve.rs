use num_rational::BigRational;
use num_traits::{One, Zero};

/// Solves `m * x = b` exactly over the rationals.
///
/// Returns `None` when the system is inconsistent. Underdetermined systems get the
/// solution with every free variable set to zero.
pub fn solve_exact(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(m.len(), b.len(), "row count mismatch");
    let ncols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = BigRational::one() / &a[rank][col];
        for x in a[rank][col..].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &f * y;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if a[rank..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = a[r][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn identity_returns_rhs() {
        let m = mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = vec![q(4), q(-2), q(7)];
        assert_eq!(solve_exact(&m, &b), Some(b));
    }

    #[test]
    fn two_by_two() {
        let m = mat(&[&[2, 1], &[1, 1]]);
        assert_eq!(solve_exact(&m, &[q(5), q(3)]), Some(vec![q(2), q(1)]));
    }

    #[test]
    fn vandermonde_recovers_square() {
        let m = mat(&[&[1, 0, 0], &[1, 1, 1], &[1, 2, 4]]);
        assert_eq!(
            solve_exact(&m, &[q(0), q(1), q(4)]),
            Some(vec![q(0), q(0), q(1)])
        );
    }

    #[test]
    fn inconsistent_is_none() {
        let m = mat(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve_exact(&m, &[q(1), q(3)]), None);
    }

    #[test]
    fn overdetermined_consistent() {
        let m = mat(&[&[1, 0], &[0, 1], &[1, 1], &[2, -1]]);
        assert_eq!(
            solve_exact(&m, &[q(3), q(5), q(8), q(1)]),
            Some(vec![q(3), q(5)])
        );
    }

    #[test]
    fn free_variables_are_zero() {
        let m = mat(&[&[1, 1, 0]]);
        assert_eq!(solve_exact(&m, &[q(2)]), Some(vec![q(2), q(0), q(0)]));
    }

    #[test]
    fn rational_solution() {
        let m = mat(&[&[3, 0], &[0, 4]]);
        let x = solve_exact(&m, &[q(1), q(2)]).unwrap();
        assert_eq!(x[0], BigRational::new(1.into(), 3.into()));
        assert_eq!(x[1], BigRational::new(1.into(), 2.into()));
    }
}
