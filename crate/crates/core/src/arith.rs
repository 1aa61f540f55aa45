//! Integer arithmetic: sieving, primality, primitive roots.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Primes `<= limit` in ascending order (sieve of Eratosthenes over odd numbers).
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("sieve limit exceeds the address space");
    // index i stands for 2i + 1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut m = p * p;
            while m <= limit {
                composite[m / 2] = true;
                m += 2 * p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(half / 4 + 1);
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && 2 * i + 1 <= limit)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    primes
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
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

/// Distinct prime factors by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of `a` modulo the prime `q`.
pub fn multiplicative_order(a: u64, q: u64) -> u64 {
    let mut order = q - 1;
    for f in distinct_prime_factors(q - 1) {
        while order % f == 0 && pow_mod(a, order / f, q) == 1 {
            order /= f;
        }
    }
    order
}

/// Smallest `g >= 2` generating `(Z/qZ)^*`.
pub fn primitive_root(q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q == 2 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (q - 1) / f, q) != 1))
        .ok_or(Error::NotPrime(q))
}

/// Exponent vector of `n` over `primes`, or `None` if `n` has another prime factor.
pub fn factor_over(mut n: u128, primes: &[u64]) -> Option<Vec<u32>> {
    let mut exps = vec![0u32; primes.len()];
    for (e, &p) in exps.iter_mut().zip(primes) {
        let p = p as u128;
        while n % p == 0 {
            n /= p;
            *e += 1;
        }
    }
    (n == 1).then_some(exps)
}
