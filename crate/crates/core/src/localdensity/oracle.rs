//! Independent congruence-counting oracle for the local densities.
//!
//! For a prime p and depth k the oracle counts, by exhaustive histogramming,
//! the solutions x ∈ (Z/p^k)^ℓ of
//!
//!   Σ_j  a_j (2(m-2) d_j x_j + 4 - m)²  ≡  H  (mod p^k)
//!
//! and returns `count / p^{k(ℓ-1)}`. This is the shifted-lattice congruence
//! with the shift cleared to an integral form, so the value converges to the
//! same local density the formula engine computes, but shares no code or
//! theory with it.
//!
//! Histogramming one coordinate costs p^k. The ℓ-fold correlation of the
//! histograms at a single target is evaluated directly for small moduli and
//! through an exact number-theoretic transform (two 62-bit prime moduli,
//! recombined by CRT) for large ones.

use crate::{Error, Rat, Result};
use num_bigint::BigInt;
use rayon::prelude::*;

const MAX_MODULUS: u128 = 6_000_000;
const DIRECT_LIMIT: usize = 4096;

/// Raw oracle value at depth k.
pub fn density_oracle(
    m: u32,
    a: &[u64],
    d: &[u64],
    p: u64,
    h_times_4: i128,
    k: u32,
) -> Result<Rat> {
    let ell = a.len();
    if ell == 0 || ell > 8 || d.len() != ell {
        return Err(Error::BadCoefficients);
    }
    let modulus = (p as u128).checked_pow(k).filter(|&m| m <= MAX_MODULUS);
    let modulus = match modulus {
        Some(mm) => mm,
        None => return Err(Error::OracleTooLarge((p as u128).pow(k.min(40)))),
    };
    let count = count_solutions(m, a, d, modulus, h_times_4);
    let denom = BigInt::from(p).pow(k * (ell as u32 - 1));
    Ok(Rat::new(BigInt::from(count), denom))
}

/// Oracle value verified stable: equal at depths k and k+1 (whenever the
/// deeper modulus stays within budget; otherwise the depth-k value is
/// returned as-is).
pub fn density_oracle_stable(
    m: u32,
    a: &[u64],
    d: &[u64],
    p: u64,
    h_times_4: i128,
    k: u32,
) -> Result<Rat> {
    let v = density_oracle(m, a, d, p, h_times_4, k)?;
    match density_oracle(m, a, d, p, h_times_4, k + 1) {
        Ok(v2) => {
            if v == v2 {
                Ok(v)
            } else {
                Err(Error::OracleUnstable { p, depth: k })
            }
        }
        Err(Error::OracleTooLarge(_)) => Ok(v),
        Err(e) => Err(e),
    }
}

fn count_solutions(m: u32, a: &[u64], d: &[u64], modulus: u128, h_times_4: i128) -> u128 {
    let target = h_times_4.rem_euclid(modulus as i128) as u128;
    let hists: Vec<Vec<u64>> = a
        .par_iter()
        .zip(d)
        .map(|(&aj, &dj)| coordinate_histogram(m, aj, dj, modulus))
        .collect();
    match hists.len() {
        1 => hists[0][target as usize] as u128,
        2 => {
            let mm = modulus as usize;
            let t = target as usize;
            let mut acc: u128 = 0;
            for v in 0..mm {
                let w = (t + mm - v) % mm;
                acc += hists[0][v] as u128 * hists[1][w] as u128;
            }
            acc
        }
        _ => {
            if modulus as usize <= DIRECT_LIMIT {
                correlate_direct(&hists, modulus as usize, target as usize)
            } else {
                ntt::correlate(&hists, modulus, target)
            }
        }
    }
}

/// Histogram of a_j (2(m-2) d_j x + 4 - m)² mod p^k over x ∈ Z/p^k.
fn coordinate_histogram(m: u32, aj: u64, dj: u64, modulus: u128) -> Vec<u64> {
    let mm = modulus;
    let step = ((2 * (m as i128 - 2) * dj as i128).rem_euclid(mm as i128)) as u128;
    let offset = ((4 - m as i128).rem_euclid(mm as i128)) as u128;
    let ac = (aj as u128) % mm;
    let mut hist = vec![0u64; mm as usize];
    let mut n = offset;
    for _ in 0..mm {
        let v = (ac * ((n * n) % mm)) % mm;
        hist[v as usize] += 1;
        n += step;
        if n >= mm {
            n -= mm;
        }
    }
    hist
}

/// O(ℓ·M²) fold-and-dot correlation; exact in u128.
fn correlate_direct(hists: &[Vec<u64>], mm: usize, target: usize) -> u128 {
    let mut acc: Vec<u128> = hists[0].iter().map(|&x| x as u128).collect();
    for h in &hists[1..hists.len() - 1] {
        let mut next = vec![0u128; mm];
        for (v, &c) in acc.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (w, &cw) in h.iter().enumerate() {
                if cw != 0 {
                    let s = v + w;
                    let s = if s >= mm { s - mm } else { s };
                    next[s] += c * cw as u128;
                }
            }
        }
        acc = next;
    }
    let last = &hists[hists.len() - 1];
    let mut total: u128 = 0;
    for (v, &c) in acc.iter().enumerate() {
        let w = (target + mm - v) % mm;
        total += c * last[w] as u128;
    }
    total
}

/// Exact cyclic correlation of prime-power length via mixed-radix NTT.
mod ntt {
    use std::collections::HashMap;
    use std::sync::Mutex;

    fn add_mod(a: u64, b: u64, q: u64) -> u64 {
        let s = a + b;
        if s >= q {
            s - q
        } else {
            s
        }
    }

    fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
        ((a as u128 * b as u128) % q as u128) as u64
    }

    fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
        let mut acc = 1u64 % q;
        b %= q;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, b, q);
            }
            b = mul_mod(b, b, q);
            e >>= 1;
        }
        acc
    }

    /// Smallest few primes q ≡ 1 (mod n) below 2^62, descending search.
    fn find_primes(n: u64, how_many: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut c = (1u64 << 62) / n;
        while out.len() < how_many && c > 0 {
            let q = c * n + 1;
            if crate::arith::is_prime(q) {
                out.push(q);
            }
            c -= 1;
        }
        out
    }

    fn primitive_root(q: u64) -> u64 {
        let phi = q - 1;
        let factors: Vec<u64> = crate::arith::factorize(phi as i128)
            .expect("phi > 0")
            .factors
            .iter()
            .map(|&(p, _)| p)
            .collect();
        'next: for g in 2..q {
            for &f in &factors {
                if pow_mod(g, phi / f, q) == 1 {
                    continue 'next;
                }
            }
            return g;
        }
        unreachable!("a primitive root exists for prime q")
    }

    /// Recursive decimation-in-time DFT of length p^k over Z/q;
    /// `w` must have exact order x.len().
    fn dft(x: &[u64], p: usize, q: u64, w: u64) -> Vec<u64> {
        let n = x.len();
        if n == 1 {
            return vec![x[0] % q];
        }
        if n == p {
            // naive p-point transform as the recursion base
            let mut out = vec![0u64; n];
            let mut wt: u64 = 1;
            for slot in out.iter_mut() {
                let mut acc = 0u64;
                let mut wjt: u64 = 1;
                for &xj in x {
                    acc = add_mod(acc, mul_mod(xj, wjt, q), q);
                    wjt = mul_mod(wjt, wt, q);
                }
                *slot = acc;
                wt = mul_mod(wt, w, q);
            }
            return out;
        }
        let m = n / p;
        let wp = pow_mod(w, p as u64, q);
        let subs: Vec<Vec<u64>> = (0..p)
            .map(|j| {
                let sub: Vec<u64> = (0..m).map(|i| x[i * p + j]).collect();
                dft(&sub, p, q, wp)
            })
            .collect();
        let mut out = vec![0u64; n];
        let mut wt: u64 = 1;
        for (t, slot) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            let mut wjt: u64 = 1;
            for sub in &subs {
                acc = add_mod(acc, mul_mod(sub[t % m], wjt, q), q);
                wjt = mul_mod(wjt, wt, q);
            }
            *slot = acc;
            wt = mul_mod(wt, w, q);
        }
        out
    }

    /// (prime, root of order n) pairs per transform length, cached since
    /// prime search and factoring q-1 dominate repeated small calls.
    fn ntt_params(n: u64) -> [(u64, u64); 2] {
        static CACHE: Mutex<Option<HashMap<u64, [(u64, u64); 2]>>> = Mutex::new(None);
        let mut guard = CACHE.lock().unwrap();
        let map = guard.get_or_insert_with(HashMap::new);
        if let Some(v) = map.get(&n) {
            return *v;
        }
        let qs = find_primes(n, 2);
        let mk = |q: u64| {
            let g = primitive_root(q);
            (q, pow_mod(g, (q - 1) / n, q))
        };
        let params = [mk(qs[0]), mk(qs[1])];
        map.insert(n, params);
        params
    }

    /// Correlation count under one NTT modulus.
    fn correlate_mod(hists: &[Vec<u64>], n: u64, target: u64, q: u64, w: u64) -> u64 {
        debug_assert_eq!(pow_mod(w, n, q), 1);
        let p_radix = crate::arith::factorize(n as i128).unwrap().factors[0].0 as usize;
        let transforms: Vec<Vec<u64>> = hists
            .iter()
            .map(|h| dft(h, p_radix, q, w))
            .collect();
        // count = (1/n) Σ_t ∏_j Ĥ_j(t) · w^{-t·target}
        let w_inv_h = pow_mod(pow_mod(w, target, q), q - 2, q);
        let mut acc = 0u64;
        let mut phase = 1u64;
        for t in 0..n as usize {
            let mut prod = 1u64;
            for tr in &transforms {
                prod = mul_mod(prod, tr[t], q);
            }
            acc = add_mod(acc, mul_mod(prod, phase, q), q);
            phase = mul_mod(phase, w_inv_h, q);
        }
        mul_mod(acc, pow_mod(n % q, q - 2, q), q)
    }

    /// Exact ℓ-fold correlation count at a single target, via NTT. One
    /// 62-bit prime suffices when the a-priori bound
    /// count ≤ (∏_{j≠j*} Σ h_j) · max h_{j*} stays below it; otherwise a
    /// second prime is recombined by CRT (count < M^ℓ ≤ M^8 < q1·q2).
    pub fn correlate(hists: &[Vec<u64>], modulus: u128, target: u128) -> u128 {
        let n = modulus as u64;
        let [(q1, w1), (q2, w2)] = ntt_params(n);
        let c1 = correlate_mod(hists, n, target as u64, q1, w1);
        let maxes: Vec<u128> = hists
            .iter()
            .map(|h| *h.iter().max().unwrap() as u128)
            .collect();
        let best = maxes.iter().copied().min().unwrap();
        let sums: u128 = modulus.pow(hists.len() as u32 - 1); // Σ h_j = M each
        if sums.checked_mul(best).is_some_and(|b| b < q1 as u128) {
            return c1 as u128;
        }
        let c2 = correlate_mod(hists, n, target as u64, q2, w2);
        crt_pair(c1, q1, c2, q2)
    }

    fn crt_pair(c1: u64, q1: u64, c2: u64, q2: u64) -> u128 {
        // x ≡ c1 (q1), x ≡ c2 (q2)
        let q1_inv = pow_mod(q1 % q2, q2 - 2, q2);
        let diff = (c2 as u128 + q2 as u128 - (c1 % q2) as u128) % q2 as u128;
        let t = (diff * q1_inv as u128) % q2 as u128;
        c1 as u128 + q1 as u128 * t
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        fn naive_dft(x: &[u64], q: u64, w: u64) -> Vec<u64> {
            let n = x.len();
            (0..n)
                .map(|t| {
                    let mut acc = 0u64;
                    for (i, &xi) in x.iter().enumerate() {
                        let tw = pow_mod(w, (i * t) as u64, q);
                        acc = add_mod(acc, mul_mod(xi, tw, q), q);
                    }
                    acc
                })
                .collect()
        }

        #[test]
        fn dft_matches_naive() {
            for (p, k) in [(3usize, 2u32), (5, 2), (2, 4), (7, 1), (11, 2)] {
                let n = (p as u64).pow(k);
                let q = find_primes(n, 1)[0];
                let g = primitive_root(q);
                let w = pow_mod(g, (q - 1) / n, q);
                let x: Vec<u64> = (0..n).map(|i| (i * i + 3) % 97).collect();
                assert_eq!(dft(&x, p, q, w), naive_dft(&x, q, w), "p={p} k={k}");
            }
        }

        #[test]
        fn correlate_matches_brute_force() {
            let mm = 27u128; // 3^3
            let hists: Vec<Vec<u64>> = (0..4)
                .map(|j| (0..27).map(|i| ((i * 7 + j * 5) % 11) as u64).collect())
                .collect();
            for target in [0u128, 5, 26] {
                let mut brute: u128 = 0;
                for v1 in 0..27usize {
                    for v2 in 0..27 {
                        for v3 in 0..27 {
                            let v4 = ((target as usize + 3 * 27) - v1 - v2 - v3) % 27;
                            brute += hists[0][v1] as u128
                                * hists[1][v2] as u128
                                * hists[2][v3] as u128
                                * hists[3][v4] as u128;
                        }
                    }
                }
                assert_eq!(correlate(&hists, mm, target), brute);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    #[test]
    fn rank_one_square_roots() {
        // ℓ=1, m=5, a=(1), d=(1): count of (6x-1)² ≡ H mod 5^k.
        // H = 4h with h ≡ 1 (mod 5), a unit square: two roots.
        let v = density_oracle(5, &[1], &[1], 5, 4, 3).unwrap();
        assert_eq!(v, rat(2));
        // Legendre (4·?/5) = -1 target: no roots. 4h with (4h/5) = -1: 4h = 8.
        let v = density_oracle(5, &[1], &[1], 5, 8, 3).unwrap();
        assert_eq!(v, rat(0));
    }

    #[test]
    fn quaternary_generic_value() {
        // m=5, a=(1,1,1,1), d=1, p=5, H=28 (unit): density is 1 - ψ(5)/25
        // with ψ(5) = (9^4 / 5) = 1, i.e. 24/25.
        let v = density_oracle_stable(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 5, 28, 2).unwrap();
        assert_eq!(v, ratio(24, 25));
    }

    #[test]
    fn direct_and_ntt_paths_agree() {
        // 5^4 = 625 uses the direct path; force NTT through the internal
        // entry point and compare.
        let m = 11;
        let a = [1u64, 2, 3, 4];
        let d = [1u64, 5, 1, 1];
        let modulus = 625u128;
        let hists: Vec<Vec<u64>> = a
            .iter()
            .zip(&d)
            .map(|(&aj, &dj)| coordinate_histogram(m, aj, dj, modulus))
            .collect();
        let target = 333u128;
        let direct = correlate_direct(&hists, modulus as usize, target as usize);
        let fast = ntt::correlate(&hists, modulus, target);
        assert_eq!(direct, fast);
    }

    #[test]
    fn oracle_depth_budget() {
        assert!(matches!(
            density_oracle(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 11, 28, 9),
            Err(Error::OracleTooLarge(_))
        ));
    }
}
