//! Closed-form reference values for the complete intersection of degrees 2, 3, 6, in
//! the form they are usually printed, including two known misprints.

/// `P(μ,t) = (μ−2t−i)/4 + 1` with `i = (μ−2t) mod 4`.
pub fn p(mu: i64, t: i64) -> i64 {
    let i = (mu - 2 * t).rem_euclid(4);
    (mu - 2 * t - i) / 4 + 1
}

/// `Q(μ,t) = (6t−μ+4j−3i)/12`, plus one when `3 | μ−3t`; `j = (μ−3t) mod 3`.
/// Returns `None` when the numerator is not divisible by 12.
pub fn q(mu: i64, t: i64) -> Option<i64> {
    let i = (mu - 2 * t).rem_euclid(4);
    let j = (mu - 3 * t).rem_euclid(3);
    let num = 6 * t - mu + 4 * j - 3 * i;
    (num % 12 == 0).then(|| num / 12 + i64::from(j == 0))
}

/// The floor formula for the Hilbert function of `k[T1,T2,T3]`, degrees `(2,1),(3,1),(6,1)`.
pub fn three_branch(mu: i64, t: i64) -> i64 {
    let f = (mu - 2 * t).div_euclid(4);
    if 2 * t <= mu && mu <= 3 * t {
        f + 1
    } else if 3 * t < mu && mu <= 6 * t {
        if (mu - 3 * t) % 3 == 0 {
            f - (mu - 3 * t) / 3 + 1
        } else {
            f - (mu - 3 * t).div_euclid(3)
        }
    } else {
        0
    }
}

fn ring(mu: i64, t: i64) -> i64 {
    if t < 0 {
        0
    } else if 2 * t <= mu && mu <= 3 * t {
        p(mu, t)
    } else if 3 * t < mu && mu <= 6 * t {
        q(mu, t).unwrap_or(i64::MIN)
    } else {
        0
    }
}

const SHIFTS: [[i64; 2]; 5] = [[5, 1], [8, 1], [9, 1], [11, 2], [11, 1]];

/// `P_k` and `Q_k`, the pieces shifted by the k-th shift (1-based).
fn pk(k: usize, mu: i64, t: i64) -> i64 {
    let [a, b] = SHIFTS[k - 1];
    p(mu - a, t - b)
}

fn qk(k: usize, mu: i64, t: i64) -> i64 {
    let [a, b] = SHIFTS[k - 1];
    q(mu - a, t - b).unwrap_or(i64::MIN)
}

/// Tor_0 values: `P` on `2t ≤ μ ≤ 3t`, `Q` on `3t < μ ≤ 6t`.
pub fn tor0(mu: i64, t: i64) -> i64 {
    ring(mu, t)
}

/// Tor_1 values from the printed nine-case table; `corrected` replaces `Q2+Q2` by
/// `Q2+Q3` and extends that row over the gap at `μ = 6t+2`.
pub fn tor1(mu: i64, t: i64, corrected: bool) -> i64 {
    let v = |a: i64, b: i64| a * t + b;
    if v(2, 3) <= mu && mu < v(2, 6) {
        pk(1, mu, t)
    } else if v(2, 6) <= mu && mu < v(2, 7) {
        pk(1, mu, t) + pk(2, mu, t)
    } else if v(2, 7) <= mu && mu < v(3, 2) {
        pk(1, mu, t) + pk(2, mu, t) + pk(3, mu, t) - pk(4, mu, t)
    } else if v(3, 2) <= mu && mu < v(3, 5) {
        qk(1, mu, t) + pk(2, mu, t) + pk(3, mu, t) - pk(4, mu, t)
    } else if v(3, 5) <= mu && mu < v(3, 6) {
        qk(1, mu, t) + qk(2, mu, t) + pk(3, mu, t) - pk(4, mu, t)
    } else if v(3, 6) <= mu && mu < v(6, -1) {
        qk(1, mu, t) + qk(2, mu, t) + qk(3, mu, t) - qk(4, mu, t)
    } else if corrected && v(6, -1) <= mu && mu <= v(6, 2) {
        qk(2, mu, t) + qk(3, mu, t)
    } else if v(6, -1) <= mu && mu < v(6, 2) {
        qk(2, mu, t) + qk(2, mu, t)
    } else if v(6, 2) < mu && mu <= v(6, 3) {
        qk(3, mu, t)
    } else {
        0
    }
}

/// Tor_2 values: `P5` on `2t+9 ≤ μ < 3t+8`, `Q5` on `3t+8 ≤ μ ≤ 6t+5`.
pub fn tor2(mu: i64, t: i64) -> i64 {
    if 2 * t + 9 <= mu && mu < 3 * t + 8 {
        pk(5, mu, t)
    } else if 3 * t + 8 <= mu && mu <= 6 * t + 5 {
        qk(5, mu, t)
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_values() {
        assert_eq!(three_branch(12, 2), 1);
        assert_eq!(three_branch(10, 2), 0);
        assert_eq!(three_branch(2, 1), 1);
        assert_eq!(three_branch(23, 9), 2);
        assert_eq!(p(23, 9), 2);
        assert_eq!(q(12, 2), Some(1));
    }

    #[test]
    fn misprinted_rows_differ() {
        let t = 10;
        assert_ne!(tor1(6 * t + 2, t, false), tor1(6 * t + 2, t, true));
        assert_eq!(tor1(6 * t + 2, t, true), 1);
    }
}
