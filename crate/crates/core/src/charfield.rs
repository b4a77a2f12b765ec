//! Prime-field arithmetic, squarefree checks, and the quadratic character of
//! `Q(sqrt(d))` realized as a Kronecker symbol.
//!
//! The character attached to a squarefree integer `d` is the completely
//! multiplicative function `chi(n) = (D|n)` where `D` is the fundamental
//! discriminant of `Q(sqrt(d))`. Two independent implementations are provided:
//! the Kronecker symbol ([`QuadraticCharacterSpec::chi`]) and Euler's criterion
//! ([`legendre_oracle`]); they must agree at every odd prime not dividing `D`.

use crate::error::CharFieldError;

/// An odd or even prime small enough for machine-word field arithmetic.
///
/// Construction runs a deterministic Miller-Rabin test, so a `PrimeModulus`
/// always holds a genuine prime `2 <= p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u64,
}

impl PrimeModulus {
    /// Word-size cap for the counting inner loops: products of two reduced
    /// residues must fit in a `u64` without widening.
    pub const MAX: u64 = 1 << 31;

    pub fn new(p: u64) -> Result<Self, CharFieldError> {
        if p >= Self::MAX {
            return Err(CharFieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(CharFieldError::NotPrime(p));
        }
        Ok(PrimeModulus { p })
    }

    pub fn get(&self) -> u64 {
        self.p
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// `base^exp mod p` by square-and-multiply.
    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let p = self.p;
        let mut b = base % p;
        let mut acc: u64 = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc
    }

    /// Reduce a signed integer into `[0, p)`.
    pub fn reduce(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
}

/// Deterministic Miller-Rabin, valid for all `n < 2^64` with this witness set.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// True iff no prime square divides `n`. Rejects `n = 0`.
pub fn is_squarefree(n: i64) -> Result<bool, CharFieldError> {
    if n == 0 {
        return Err(CharFieldError::ZeroNotAllowed);
    }
    let mut m = n.unsigned_abs();
    let mut q = 2u64;
    while q * q <= m {
        if m % q == 0 {
            m /= q;
            if m % q == 0 {
                return Ok(false);
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    Ok(true)
}

/// The quadratic character of `K = Q(sqrt(d))` for squarefree `d != 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticCharacterSpec {
    d: i64,
    discriminant: i64,
}

impl QuadraticCharacterSpec {
    pub fn new(d: i64) -> Result<Self, CharFieldError> {
        if d == 0 || d == 1 {
            return Err(CharFieldError::TrivialTwist(d));
        }
        if !is_squarefree(d)? {
            return Err(CharFieldError::NotSquarefree(d));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        debug_assert!(discriminant.rem_euclid(4) == 0 || discriminant.rem_euclid(4) == 1);
        Ok(QuadraticCharacterSpec { d, discriminant })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Fundamental discriminant `D` of `Q(sqrt(d))`: `d` if `d = 1 mod 4`, else `4d`.
    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// `chi(n)`, the Kronecker symbol `(D|n)`. Zero exactly when `gcd(n, D) > 1`.
    pub fn chi(&self, n: i64) -> i8 {
        kronecker(self.discriminant, n)
    }

    /// `chi` at a prime modulus, the form consumed by the counting pipelines.
    pub fn chi_p(&self, p: &PrimeModulus) -> i8 {
        self.chi(p.get() as i64)
    }
}

/// The Kronecker symbol `(a|n)`, extending the Jacobi and Legendre symbols to
/// all integer `n` (including even, negative, and zero denominators).
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut sign = 1i8;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let mut k = 0u32;
        while n % 2 == 0 {
            n /= 2;
            k += 1;
        }
        // (a|2) = +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
        if k % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
    }
    // n is now odd and positive; run the Jacobi reduction.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Euler's criterion `a^((p-1)/2) mod p`, mapped to `{-1, 0, +1}`.
///
/// Independent of [`kronecker`]; kept as an oracle for the character code.
pub fn legendre_oracle(a: i64, p: &PrimeModulus) -> Result<i8, CharFieldError> {
    if !p.is_odd() {
        return Err(CharFieldError::OddPrimeRequired);
    }
    let r = p.pow(p.reduce(a), (p.get() - 1) / 2);
    Ok(if r == 0 {
        0
    } else if r == 1 {
        1
    } else {
        -1
    })
}

/// Legendre symbols of `0..p` as a lookup table, for counting inner loops.
pub fn legendre_table(p: &PrimeModulus) -> Vec<i8> {
    let pp = p.get() as usize;
    let mut t = vec![-1i8; pp];
    t[0] = 0;
    let mut x = 1u64;
    while x <= (pp as u64 - 1) / 2 + 1 {
        if x >= pp as u64 {
            break;
        }
        t[(x * x % pp as u64) as usize] = 1;
        x += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn squarefree_basics() {
        assert!(is_squarefree(1).unwrap());
        assert!(!is_squarefree(12).unwrap());
        assert!(is_squarefree(-15).unwrap());
        assert!(is_squarefree(2).unwrap());
        assert!(!is_squarefree(-4).unwrap());
        assert!(is_squarefree(30).unwrap());
        assert!(!is_squarefree(49).unwrap());
        assert!(is_squarefree(i64::MIN + 1).is_ok());
        assert!(is_squarefree(0).is_err());
    }

    #[test]
    fn squarefree_matches_trial_division_oracle() {
        // Oracle: factor |n| completely and look for a repeated prime.
        fn oracle(n: i64) -> bool {
            let mut m = n.unsigned_abs();
            let mut last = 0u64;
            let mut q = 2u64;
            while m > 1 {
                if m % q == 0 {
                    if q == last {
                        return false;
                    }
                    last = q;
                    m /= q;
                } else {
                    q += 1;
                }
            }
            true
        }
        for n in 1..500i64 {
            assert_eq!(is_squarefree(n).unwrap(), oracle(n), "n = {n}");
            assert_eq!(is_squarefree(-n).unwrap(), oracle(n), "n = -{n}");
        }
    }

    #[test]
    fn prime_modulus_construction() {
        assert!(PrimeModulus::new(2).is_ok());
        assert!(PrimeModulus::new(101).is_ok());
        assert!(PrimeModulus::new(0).is_err());
        assert!(PrimeModulus::new(1).is_err());
        assert!(PrimeModulus::new(91).is_err()); // 7 * 13
        assert!(PrimeModulus::new(1 << 31).is_err());
        assert!(PrimeModulus::new(2147483647).is_ok()); // Mersenne prime 2^31 - 1
    }

    #[test]
    fn character_spec_validation() {
        assert!(QuadraticCharacterSpec::new(0).is_err());
        assert!(QuadraticCharacterSpec::new(1).is_err());
        assert!(QuadraticCharacterSpec::new(12).is_err());
        let c = QuadraticCharacterSpec::new(5).unwrap();
        assert_eq!(c.discriminant(), 5);
        let c = QuadraticCharacterSpec::new(-1).unwrap();
        assert_eq!(c.discriminant(), -4);
        let c = QuadraticCharacterSpec::new(2).unwrap();
        assert_eq!(c.discriminant(), 8);
        let c = QuadraticCharacterSpec::new(-3).unwrap();
        assert_eq!(c.discriminant(), -3);
        let c = QuadraticCharacterSpec::new(-2).unwrap();
        assert_eq!(c.discriminant(), -8);
    }

    #[test]
    fn chi_examples() {
        // Euler criterion checks: 2^2 = 4 = -1 mod 5, and (-1)^3 = -1 mod 7.
        let c5 = QuadraticCharacterSpec::new(5).unwrap();
        assert_eq!(c5.chi(2), -1);
        let cm1 = QuadraticCharacterSpec::new(-1).unwrap();
        assert_eq!(cm1.chi(7), -1);
        for d in [-5, -3, -2, -1, 2, 3, 5, 6, -30] {
            assert_eq!(QuadraticCharacterSpec::new(d).unwrap().chi(1), 1, "d = {d}");
        }
    }

    #[test]
    fn chi_zero_exactly_on_common_factors() {
        for d in [-1, 2, -2, 3, -3, 5, -5, 6, 10, -15] {
            let c = QuadraticCharacterSpec::new(d).unwrap();
            let dd = c.discriminant();
            for n in -50..=50i64 {
                let expect_zero = num_integer::gcd(n, dd) != 1;
                assert_eq!(c.chi(n) == 0, expect_zero, "d = {d}, n = {n}");
            }
        }
    }

    #[test]
    fn legendre_oracle_examples() {
        let p7 = PrimeModulus::new(7).unwrap();
        assert_eq!(legendre_oracle(4, &p7).unwrap(), 1);
        assert_eq!(legendre_oracle(0, &p7).unwrap(), 0);
        // 3^3 = 27 = 6 = -1 mod 7
        assert_eq!(legendre_oracle(3, &p7).unwrap(), -1);
        let p2 = PrimeModulus::new(2).unwrap();
        assert!(legendre_oracle(1, &p2).is_err());
    }

    #[test]
    fn legendre_table_matches_oracle() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let pm = PrimeModulus::new(p).unwrap();
            let table = legendre_table(&pm);
            for a in 0..p {
                assert_eq!(table[a as usize], legendre_oracle(a as i64, &pm).unwrap());
            }
        }
    }

    fn small_odd_primes() -> Vec<u64> {
        (3..400u64).filter(|&n| is_prime(n)).collect()
    }

    #[test]
    fn chi_agrees_with_euler_criterion_at_odd_primes() {
        for d in [-1, 2, -2, 3, -3, 5, -5, 6, -7, 10, -15, 21] {
            let c = QuadraticCharacterSpec::new(d).unwrap();
            for &p in &small_odd_primes() {
                if c.discriminant() % p as i64 == 0 {
                    continue;
                }
                let pm = PrimeModulus::new(p).unwrap();
                assert_eq!(
                    c.chi(p as i64),
                    legendre_oracle(c.discriminant(), &pm).unwrap(),
                    "d = {d}, p = {p}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn chi_completely_multiplicative(d in -60i64..60, m in -300i64..300, n in -300i64..300) {
            prop_assume!(d != 0 && d != 1 && is_squarefree(d).unwrap());
            let c = QuadraticCharacterSpec::new(d).unwrap();
            prop_assert_eq!(c.chi(m * n), c.chi(m) * c.chi(n));
        }

        #[test]
        fn chi_periodic_mod_abs_discriminant(d in -60i64..60, n in -1000i64..1000) {
            prop_assume!(d != 0 && d != 1 && is_squarefree(d).unwrap());
            let c = QuadraticCharacterSpec::new(d).unwrap();
            prop_assert_eq!(c.chi(n + c.discriminant().abs()), c.chi(n));
        }

        #[test]
        fn chi_squares_to_one_off_discriminant(d in -60i64..60, n in -1000i64..1000) {
            prop_assume!(d != 0 && d != 1 && is_squarefree(d).unwrap());
            let c = QuadraticCharacterSpec::new(d).unwrap();
            prop_assume!(num_integer::gcd(n, c.discriminant()) == 1);
            prop_assert_eq!(c.chi(n) * c.chi(n), 1);
        }
    }
}
