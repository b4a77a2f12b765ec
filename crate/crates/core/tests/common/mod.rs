//! Shared test oracles, independent of the library's computation paths.
#![allow(dead_code)] // each test binary uses its own subset

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Binomial coefficient C(n, k) as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Brute-force eta-quotient expansion: every factor `(1 - q^{mn})^r` is
/// written out with the binomial theorem (negative exponents via the
/// negative-binomial series) and the truncated series are multiplied term by
/// term. No in-place updates, no series inversion; this is a genuinely
/// different route from the library's expander.
pub fn eta_oracle(factors: &[(u64, i32)], precision: usize) -> Vec<BigInt> {
    let weighted: i64 = factors.iter().map(|&(m, r)| m as i64 * r as i64).sum();
    assert_eq!(weighted % 24, 0, "oracle input must be a valid eta quotient");
    let lead = weighted / 24;
    assert!(lead >= 1, "oracle only handles cusp-form-style quotients");
    let cut = precision - lead as usize; // degrees 0..=cut of the unit part

    let mut series = vec![BigInt::zero(); cut + 1];
    series[0] = BigInt::one();
    for &(m, r) in factors {
        for n in 1.. {
            let k = (m * n) as usize;
            if k > cut {
                break;
            }
            // (1 - x^k)^r as an explicit truncated series
            let mut factor = vec![BigInt::zero(); cut + 1];
            if r >= 0 {
                for j in 0..=(r as u64) {
                    let deg = j as usize * k;
                    if deg > cut {
                        break;
                    }
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    factor[deg] = binomial(r as u64, j) * BigInt::from(sign);
                }
            } else {
                let s = (-r) as u64;
                for j in 0.. {
                    let deg = j as usize * k;
                    if deg > cut {
                        break;
                    }
                    factor[deg] = binomial(j + s - 1, s - 1);
                }
            }
            // naive truncated product
            let mut next = vec![BigInt::zero(); cut + 1];
            for (i, a) in series.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in factor.iter().enumerate().take(cut + 1 - i) {
                    if !b.is_zero() {
                        next[i + j] += a * b;
                    }
                }
            }
            series = next;
        }
    }

    let mut coeffs = vec![BigInt::zero(); precision];
    for (i, c) in series.into_iter().enumerate() {
        let n = lead as usize + i;
        if 1 <= n && n <= precision {
            coeffs[n - 1] = c;
        }
    }
    coeffs
}

/// Primes up to and including `n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let mut sieve = vec![true; n as usize + 1];
    let mut out = Vec::new();
    for q in 2..=n as usize {
        if sieve[q] {
            out.push(q as u64);
            let mut k = q * q;
            while k <= n as usize {
                sieve[k] = false;
                k += q;
            }
        }
    }
    out
}

/// The six cataloged eta quotients with their levels.
pub fn cataloged_eta_table() -> Vec<(&'static str, Vec<(u64, i32)>, u64)> {
    vec![
        ("beauville-I", vec![(3, 8)], 9),
        ("beauville-II", vec![(2, 4), (4, 4)], 8),
        ("beauville-III", vec![(1, 4), (5, 4)], 5),
        ("beauville-IV", vec![(1, 2), (2, 2), (3, 2), (6, 2)], 6),
        ("beauville-V", vec![(4, 16), (8, -4), (2, -4)], 16),
        ("beauville-VI", vec![(3, 8)], 9),
    ]
}

/// A tiny deterministic generator for property-style sampling in tests.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
}
