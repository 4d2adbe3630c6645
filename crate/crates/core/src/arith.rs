//! Exact integer arithmetic utilities: factorization, the prime-counting
//! functions Ω and ω, Legendre/Kronecker symbols, the quartic unit ε_p,
//! primorials and almost-prime membership.

use crate::{Error, Result};
use num_bigint::BigUint;
use std::collections::BTreeSet;

/// Exact prime factorization of a nonzero integer.
///
/// `n = sign · ∏ p^e` with primes strictly increasing and every exponent
/// at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: i128,
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Multiply the factorization back together; inverse of [`factorize`].
    pub fn recompose(&self) -> i128 {
        let mut acc: i128 = self.sign as i128;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc *= p as i128;
            }
        }
        acc
    }

    /// Ω(n): number of prime divisors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// ω(n): number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// True when no exponent exceeds 1.
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// Finite set of exceptional primes, default `{2, 3}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSetS {
    primes: BTreeSet<u64>,
}

impl Default for PrimeSetS {
    fn default() -> Self {
        PrimeSetS::new(&[2, 3]).unwrap()
    }
}

impl PrimeSetS {
    pub fn new(primes: &[u64]) -> Result<Self> {
        for &p in primes {
            if !is_prime(p) {
                return Err(Error::NotOddPrime(p));
            }
        }
        Ok(PrimeSetS {
            primes: primes.iter().copied().collect(),
        })
    }

    pub fn empty() -> Self {
        PrimeSetS {
            primes: BTreeSet::new(),
        }
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// The quartic unit ε_p ∈ {1, i}: 1 for p ≡ 1 (mod 4), i for p ≡ 3 (mod 4).
/// ε_p² equals the Legendre symbol (-1/p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarticUnit {
    One,
    Imag,
}

impl QuarticUnit {
    /// (re, im) components of ε_p^k.
    pub fn pow(self, k: u32) -> (i8, i8) {
        match self {
            QuarticUnit::One => (1, 0),
            QuarticUnit::Imag => match k % 4 {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            },
        }
    }
}

/// ε_p for an odd prime p.
pub fn eps_p(p: u64) -> Result<QuarticUnit> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(if p % 4 == 1 {
        QuarticUnit::One
    } else {
        QuarticUnit::Imag
    })
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // m < 2^64 in all callers, so the product fits u128
    (a * b) % m
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc: u128 = 1 % m;
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

/// Deterministic Miller–Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let n128 = n as u128;
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = (d >> s) as u128;
    // This base set is deterministic for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a as u128, d, n128);
        if x == 1 || x == n128 - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n128);
            if x == n128 - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    // n is odd, composite, and not a prime power of a small prime
    let n128 = n as u128;
    let mut c: u128 = 1;
    loop {
        let f = |x: u128| (mul_mod(x, x, n128) + c) % n128;
        let mut x: u128 = 2;
        let mut y: u128 = 2;
        let mut d: u64 = 1;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = if x > y { x - y } else { y - x };
            d = gcd_u64(diff as u64, n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Exact prime factorization. Trial division by small primes, then
/// Miller–Rabin plus Pollard rho for the leftover cofactor.
pub fn factorize(n: i128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroFactorization);
    }
    let sign: i8 = if n < 0 { -1 } else { 1 };
    let mut m = n.unsigned_abs();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if p * p > m {
            break;
        }
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p as u64, e));
        }
    }
    let mut p = 49u128;
    while p * p <= m && p < 1_000_000 {
        // 49 is 2 mod 47... just walk odd numbers; the density loss is
        // irrelevant at this scale
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p as u64, e));
        }
        p += 2;
    }
    if m > 1 {
        debug_assert!(m <= u64::MAX as u128, "inputs are desk scale");
        let mut rest = Vec::new();
        factor_u64_into(m as u64, &mut rest);
        rest.sort_unstable();
        let mut i = 0;
        while i < rest.len() {
            let q = rest[i];
            let mut e = 0;
            while i < rest.len() && rest[i] == q {
                e += 1;
                i += 1;
            }
            factors.push((q, e));
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(Factorization { n, sign, factors })
}

/// Ω(n) = Σ b_p, the number of prime factors with multiplicity.
pub fn big_omega(n: i128) -> Result<u32> {
    Ok(factorize(n)?.big_omega())
}

/// Σ b_p over primes p | n with p ∉ S.
pub fn omega_away_from(n: i128, s: &PrimeSetS) -> Result<u32> {
    let f = factorize(n)?;
    Ok(f.factors
        .iter()
        .filter(|&&(p, _)| !s.contains(p))
        .map(|&(_, e)| e)
        .sum())
}

/// Almost-prime membership: n = 0, or at most `l` prime factors (with
/// multiplicity) outside the exceptional set.
pub fn is_almost_prime(n: i128, l: u32, s: &PrimeSetS) -> bool {
    if n == 0 {
        return true;
    }
    omega_away_from(n, s).expect("n != 0") <= l
}

/// p-adic valuation ord_p(n) for n ≠ 0.
pub fn valuation(n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut m = n.unsigned_abs();
    let p = p as u128;
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Unit part of n at p: n / p^ord_p(n), keeping the sign.
pub fn unit_part(n: i128, p: u64) -> i128 {
    debug_assert!(n != 0);
    let mut m = n;
    let p = p as i128;
    while m % p == 0 {
        m /= p;
    }
    m
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i128, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let pi = p as i128;
    let r = a.rem_euclid(pi) as u128;
    if r == 0 {
        return Ok(0);
    }
    let e = pow_mod(r, ((p - 1) / 2) as u128, p as u128);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Kronecker symbol (a/n), defined for all integers.
pub fn kronecker(a: i128, n: i128) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let v = valuation(n, 2);
        n >>= v;
        // (a/2)^v
        if v % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // now n is odd and positive; standard Jacobi with sign flips
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// All primes up to and including `limit` by sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// M_S(X) = ∏ of primes p ≤ X with p ∉ S. Empty product is 1.
pub fn primorial_away_from(x: f64, s: &PrimeSetS) -> BigUint {
    let mut acc = BigUint::from(1u32);
    if x < 2.0 {
        return acc;
    }
    for p in primes_up_to(x.floor() as u64) {
        if !s.contains(p) {
            acc *= BigUint::from(p);
        }
    }
    acc
}

/// Interval primorial P_w(z) = ∏ of primes p with w ≤ p < z and p ∉ S.
pub fn primorial_interval(w: f64, z: f64, s: &PrimeSetS) -> BigUint {
    let mut acc = BigUint::from(1u32);
    if z <= 2.0 {
        return acc;
    }
    for p in primes_up_to(z.ceil() as u64) {
        let pf = p as f64;
        if pf >= w && pf < z && !s.contains(p) {
            acc *= BigUint::from(p);
        }
    }
    acc
}

/// Primes p with w ≤ p ≤ z and p ∉ S (closed interval on both ends).
pub fn primes_in_closed(w: f64, z: f64, s: &PrimeSetS) -> Vec<u64> {
    if z < 2.0 {
        return Vec::new();
    }
    primes_up_to(z.floor() as u64)
        .into_iter()
        .filter(|&p| (p as f64) >= w && !s.contains(p))
        .collect()
}

/// Möbius function of a positive integer.
pub fn moebius(n: u64) -> Result<i8> {
    let f = factorize(n as i128)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.omega() % 2 == 0 { 1 } else { -1 })
}

/// True when n ≥ 1 has no repeated prime factor.
pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n as i128).map(|f| f.is_squarefree()).unwrap_or(false)
}
