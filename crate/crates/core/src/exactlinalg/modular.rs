//! Multi-modular solver for large sparse integer systems.
//!
//! Each prime yields an echelon form over `F_p`; solutions are combined by the Chinese
//! remainder theorem, lifted by rational reconstruction and accepted only after an exact
//! check of every equation.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::solve::solve_exact;

/// Sparse row: `(column, coefficient)` pairs.
pub type SparseRow = Vec<(usize, BigInt)>;

const MAX_PRIMES: usize = 40;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Descending primes below `2^62`.
pub fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while !is_prime_u64(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

fn to_mod(x: &BigInt, p: u64) -> u64 {
    if let Some(v) = x.to_i64() {
        return i128::from(v).rem_euclid(i128::from(p)) as u64;
    }
    let m = x.mod_floor(&BigInt::from(p));
    m.to_u64().expect("residue fits")
}

enum ModResult {
    Inconsistent,
    Solved { pivots: Vec<usize>, x: Vec<u64> },
}

fn solve_mod(rows: &[SparseRow], rhs: &[BigInt], ncols: usize, p: u64) -> ModResult {
    // echelon rows with unit pivot, each reduced against all earlier pivots
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut dense = vec![0u64; ncols + 1];
    for (row, b) in rows.iter().zip(rhs) {
        dense.iter_mut().for_each(|x| *x = 0);
        for (c, v) in row {
            dense[*c] = (dense[*c] + to_mod(v, p)) % p;
        }
        dense[ncols] = to_mod(b, p);
        for (pc, prow) in &basis {
            let f = dense[*pc];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in dense[*pc..].iter_mut().zip(&prow[*pc..]) {
                if y != 0 {
                    *x = (*x + mul_mod(nf, y, p)) % p;
                }
            }
        }
        match dense[..ncols].iter().position(|&x| x != 0) {
            None => {
                if dense[ncols] != 0 {
                    return ModResult::Inconsistent;
                }
            }
            Some(pc) => {
                let inv = pow_mod(dense[pc], p - 2, p);
                let prow: Vec<u64> = dense.iter().map(|&x| mul_mod(x, inv, p)).collect();
                basis.push((pc, prow));
                if basis.len() == ncols {
                    // full column rank: remaining rows only need a consistency check
                    break;
                }
            }
        }
    }
    let mut x = vec![0u64; ncols];
    for (pc, prow) in basis.iter().rev() {
        let mut v = prow[ncols];
        for (c, &coef) in prow.iter().enumerate().take(ncols).skip(pc + 1) {
            if coef != 0 && x[c] != 0 {
                v = (v + p - mul_mod(coef, x[c], p)) % p;
            }
        }
        x[*pc] = v;
    }
    let mut pivots: Vec<usize> = basis.iter().map(|(c, _)| *c).collect();
    pivots.sort_unstable();
    if pivots.len() == ncols {
        for (row, b) in rows.iter().zip(rhs) {
            let mut s = 0u64;
            for (c, v) in row {
                s = (s + mul_mod(to_mod(v, p), x[*c], p)) % p;
            }
            if s != to_mod(b, p) {
                return ModResult::Inconsistent;
            }
        }
    }
    ModResult::Solved { pivots, x }
}

/// Rational number `a/b` with `a ≡ r b (mod m)` and `|a|, b <= sqrt(m/2)`.
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    if s1.sign() == Sign::Minus {
        r1 = -r1;
        s1 = -s1;
    }
    if !r1.gcd(&s1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, s1))
}

fn verify(rows: &[SparseRow], rhs: &[BigInt], x: &[BigRational]) -> bool {
    let den = x
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    rows.iter().zip(rhs).all(|(row, b)| {
        let s: BigInt = row.iter().map(|(c, v)| v * &scaled[*c]).sum();
        s == b * &den
    })
}

/// Solves the sparse integer system exactly; `None` means inconsistent.
///
/// Free variables are fixed at zero, so the answer is unique for a given row order.
pub fn solve_sparse(rows: &[SparseRow], rhs: &[BigInt], ncols: usize) -> Option<Vec<BigRational>> {
    assert_eq!(rows.len(), rhs.len(), "row count mismatch");
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); ncols];
    let mut reference: Option<Vec<usize>> = None;
    let mut inconsistent = 0;
    for p in primes().take(MAX_PRIMES) {
        let (pivots, x) = match solve_mod(rows, rhs, ncols, p) {
            ModResult::Inconsistent => {
                inconsistent += 1;
                if inconsistent >= 2 {
                    return None;
                }
                continue;
            }
            ModResult::Solved { pivots, x } => (pivots, x),
        };
        match &reference {
            Some(r) if r.len() > pivots.len() => continue,
            Some(r) if r.len() == pivots.len() && *r != pivots => continue,
            Some(r) if r.len() == pivots.len() => {}
            _ => {
                reference = Some(pivots);
                modulus = BigInt::one();
                residues.iter_mut().for_each(|v| *v = BigInt::zero());
            }
        }
        let pb = BigInt::from(p);
        if modulus.is_one() {
            residues = x.iter().map(|&v| BigInt::from(v)).collect();
        } else {
            // CRT: v ≡ old (mod N), v ≡ new (mod p)
            let inv_n = BigInt::from(pow_mod(to_mod(&modulus, p), p - 2, p));
            for (old, &new) in residues.iter_mut().zip(&x) {
                let diff = (BigInt::from(new) - &*old).mod_floor(&pb);
                let k = (diff * &inv_n).mod_floor(&pb);
                *old += &modulus * k;
            }
        }
        modulus *= &pb;
        let lifted: Option<Vec<BigRational>> = residues
            .iter()
            .map(|r| rational_reconstruct(r, &modulus))
            .collect();
        if let Some(sol) = lifted {
            if verify(rows, rhs, &sol) {
                return Some(sol);
            }
        }
    }
    log::warn!("multi-modular solve did not stabilise; falling back to dense elimination");
    let dense: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|row| {
            let mut r = vec![BigRational::zero(); ncols];
            for (c, v) in row {
                r[*c] += BigRational::from_integer(v.clone());
            }
            r
        })
        .collect();
    let b: Vec<BigRational> = rhs.iter().cloned().map(BigRational::from_integer).collect();
    solve_exact(&dense, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[i64]) -> SparseRow {
        v.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(c, &x)| (c, BigInt::from(x)))
            .collect()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn primes_are_prime_and_large() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert!(ps.iter().all(|&p| is_prime_u64(p) && p > 1 << 61));
        assert!(ps[0] > ps[1] && ps[1] > ps[2]);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn reconstruct_small_fractions() {
        let m = BigInt::from(1_000_000_007u64);
        for (a, b) in [(1, 3), (-5, 12), (7, 1), (0, 1)] {
            let inv = BigInt::from(b).modpow(&(&m - 2), &m);
            let r = (BigInt::from(a) * inv).mod_floor(&m);
            assert_eq!(rational_reconstruct(&r, &m), Some(rat(a, b)));
        }
    }

    #[test]
    fn overdetermined_rational() {
        let rows = vec![row(&[3, 0]), row(&[0, 4]), row(&[3, 4])];
        let rhs = vec![1.into(), 2.into(), 3.into()];
        assert_eq!(
            solve_sparse(&rows, &rhs, 2),
            Some(vec![rat(1, 3), rat(1, 2)])
        );
    }

    #[test]
    fn inconsistent_detected() {
        let rows = vec![row(&[1, 1]), row(&[2, 2])];
        let rhs = vec![1.into(), 3.into()];
        assert_eq!(solve_sparse(&rows, &rhs, 2), None);
    }

    #[test]
    fn rank_deficient_consistent() {
        let rows = vec![row(&[1, 1, 0]), row(&[2, 2, 0]), row(&[0, 0, 5])];
        let rhs = vec![2.into(), 4.into(), 1.into()];
        let x = solve_sparse(&rows, &rhs, 3).unwrap();
        assert!(verify(&rows, &rhs, &x));
    }

    #[test]
    fn large_coefficients_need_several_primes() {
        let big = BigInt::from(10).pow(40u32);
        let rows: Vec<SparseRow> = vec![
            vec![(0, big.clone()), (1, BigInt::one())],
            vec![(0, BigInt::one()), (1, big.clone())],
        ];
        let rhs = vec![BigInt::from(7), BigInt::from(-3)];
        let x = solve_sparse(&rows, &rhs, 2).unwrap();
        assert!(verify(&rows, &rhs, &x));
    }

    #[test]
    fn agrees_with_dense_solver() {
        let dense = [[2i64, -1, 3], [1, 4, -2], [5, 0, 1], [3, 3, 1]];
        let xs = [rat(1, 7), rat(-2, 3), rat(5, 2)];
        let rows: Vec<SparseRow> = dense.iter().map(|r| row(r)).collect();
        let rhs: Vec<BigInt> = dense
            .iter()
            .map(|r| {
                let s: BigRational = r
                    .iter()
                    .zip(&xs)
                    .map(|(&a, x)| x * BigInt::from(a))
                    .sum();
                s
            })
            .map(|s| (s * BigInt::from(42)).to_integer())
            .collect();
        let x = solve_sparse(&rows, &rhs, 3).unwrap();
        let expect: Vec<BigRational> = xs.iter().map(|v| v * BigInt::from(42)).collect();
        assert_eq!(x, expect);
    }
}
