//! Exact rationals and a few combinatorial helpers shared across modules.

use num_bigint::BigInt;
use num_traits::One;

/// Arbitrary precision fraction, always stored reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn binomial(n: usize, k: usize) -> Rational {
    Rational::from_integer(BigInt::from(binomial_u(n, k)))
}

/// Binomial coefficient as an integer; zero when `k > n`.
pub fn binomial_u(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Binomial coefficient with a possibly negative lower index (zero outside `0..=n`).
pub fn binomial_i(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binomial_u(n as usize, k as usize)
    }
}

/// `(-1)^n` as a rational.
pub fn sign_pow(n: usize) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Sign of the permutation given in one-line notation.
pub fn perm_sign(perm: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// All `k`-element subsets of `0..n` as sorted vectors, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            break;
        };
        current[i] += 1;
        for t in i + 1..k {
            current[t] = current[t - 1] + 1;
        }
    }
    out
}

/// Every tuple in `{0..base}^len`, last position varying fastest.
pub fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let total = base.checked_pow(len as u32).unwrap_or(0);
    let mut out = Vec::with_capacity(total);
    if base == 0 && len > 0 {
        return out;
    }
    let mut current = vec![0usize; len];
    loop {
        out.push(current.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < base {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
