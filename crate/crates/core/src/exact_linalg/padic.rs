use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A p-adic valuation; zero has valuation `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PAdicVal {
    Finite(i64),
    Infinite,
}

impl PAdicVal {
    pub fn finite(self) -> Option<i64> {
        match self {
            PAdicVal::Finite(v) => Some(v),
            PAdicVal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == PAdicVal::Infinite
    }
}

impl Ord for PAdicVal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PAdicVal::Finite(a), PAdicVal::Finite(b)) => a.cmp(b),
            (PAdicVal::Finite(_), PAdicVal::Infinite) => Ordering::Less,
            (PAdicVal::Infinite, PAdicVal::Finite(_)) => Ordering::Greater,
            (PAdicVal::Infinite, PAdicVal::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for PAdicVal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for PAdicVal {
    type Output = PAdicVal;
    fn add(self, rhs: PAdicVal) -> PAdicVal {
        match (self, rhs) {
            (PAdicVal::Finite(a), PAdicVal::Finite(b)) => PAdicVal::Finite(a + b),
            _ => PAdicVal::Infinite,
        }
    }
}

impl fmt::Display for PAdicVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PAdicVal::Finite(v) => write!(f, "{v}"),
            PAdicVal::Infinite => write!(f, "inf"),
        }
    }
}

impl serde::Serialize for PAdicVal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PAdicVal::Finite(v) => s.serialize_i64(*v),
            PAdicVal::Infinite => s.serialize_str("inf"),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Trial division by small primes, then Miller-Rabin with a base set that
/// is deterministic on all of `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut q = 41;
    while q < 1000 && q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    if q * q > n {
        return true;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Valuation of an integer at a prime the caller has already checked.
pub fn valuation_of_int(n: &BigInt, p: u64) -> PAdicVal {
    if n.is_zero() {
        return PAdicVal::Infinite;
    }
    let p = BigInt::from(p);
    let mut x = n.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return PAdicVal::Finite(v);
        }
        x = q;
        v += 1;
    }
}

pub fn p_adic_valuation(x: &BigRational, p: u64) -> Result<PAdicVal> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(rational_valuation(x, p))
}

pub(crate) fn rational_valuation(x: &BigRational, p: u64) -> PAdicVal {
    match valuation_of_int(x.numer(), p) {
        PAdicVal::Infinite => PAdicVal::Infinite,
        PAdicVal::Finite(a) => {
            let b = valuation_of_int(x.denom(), p).finite().unwrap_or(0);
            PAdicVal::Finite(a - b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;

    #[test]
    fn valuations_from_worked_example() {
        assert_eq!(p_adic_valuation(&rat(729, 1078), 3).unwrap(), PAdicVal::Finite(6));
        assert_eq!(p_adic_valuation(&rat(1, 1), 5).unwrap(), PAdicVal::Finite(0));
        assert_eq!(p_adic_valuation(&rat(0, 1), 2).unwrap(), PAdicVal::Infinite);
        assert_eq!(p_adic_valuation(&rat(5, 12), 2).unwrap(), PAdicVal::Finite(-2));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(p_adic_valuation(&rat(3, 1), 9), Err(Error::NotPrime(9)));
        assert!(p_adic_valuation(&rat(3, 1), 1).is_err());
    }

    #[test]
    fn primality_matches_sieve() {
        let n = 5000;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u64), p, "{i}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn infinity_orders_last() {
        assert!(PAdicVal::Finite(100) < PAdicVal::Infinite);
        assert_eq!(PAdicVal::Finite(2) + PAdicVal::Infinite, PAdicVal::Infinite);
    }
}
