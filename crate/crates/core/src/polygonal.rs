//! Generalized m-gonal numbers, the polygonal-to-quadratic transform
//! `N_j = 2(m-2) n_j + 4 - m`, and brute-force enumeration of
//! `Σ a_j p_m(n_j) = n` under divisibility / gcd / almost-prime constraints.

use crate::arith::{self, PrimeSetS};
use crate::{ratio, Error, Rat, Result};

/// p_m(n) = (m-2)n²/2 + (4-m)n/2, evaluated at any integer n.
/// Nonnegative for every n once m ≥ 3.
pub fn pm(m: u32, n: i64) -> Result<i128> {
    if m < 3 {
        return Err(Error::PolygonOrder(m));
    }
    let m = m as i128;
    let n = n as i128;
    Ok((((m - 2) * n * n) + (4 - m) * n) / 2)
}

/// A representation problem `Σ_{j=1}^ℓ a_j p_m(n_j) = n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonalProblem {
    pub m: u32,
    pub a: Vec<u64>,
    pub n: u64,
}

impl PolygonalProblem {
    pub fn new(m: u32, a: &[u64], n: i64) -> Result<Self> {
        if m < 3 {
            return Err(Error::PolygonOrder(m));
        }
        if a.is_empty() || a.len() > 8 || a.iter().any(|&x| x == 0) {
            return Err(Error::BadCoefficients);
        }
        if n < 0 {
            return Err(Error::NegativeTarget(n));
        }
        Ok(PolygonalProblem {
            m,
            a: a.to_vec(),
            n: n as u64,
        })
    }

    pub fn ell(&self) -> usize {
        self.a.len()
    }

    /// The scaled target of the completed-square form.
    pub fn scaled_target(&self) -> ScaledTarget {
        let m = self.m as i128;
        let sum_a: i128 = self.a.iter().map(|&x| x as i128).sum();
        let h_big = 8 * (m - 2) * self.n as i128 + (m - 4) * (m - 4) * sum_a;
        ScaledTarget {
            h_times_4: h_big,
            h_quarter: ratio(h_big, 4),
        }
    }
}

/// H = 8(m-2)n + (m-4)² Σ a_j together with the exact quarter value
/// h = H/4 = 2n(m-2) + ((m-4)/2)² Σ a_j; every solution satisfies
/// Σ a_j N_j² = H with N_j = 2(m-2) n_j + 4 - m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledTarget {
    pub h_times_4: i128,
    pub h_quarter: Rat,
}

/// Constraints applied to enumerated solutions. Coordinates with n_j = 0
/// are exempt from the gcd and almost-prime filters.
#[derive(Debug, Clone, Default)]
pub struct SolutionConstraint {
    /// Required divisors d_j | n_j (1 = unconstrained); must be squarefree.
    pub divisors: Option<Vec<u64>>,
    /// Squarefree modulus Q: require gcd(n_j, Q) = 1 for n_j ≠ 0.
    pub gcd_modulus: Option<u128>,
    /// Almost-prime filter: each nonzero n_j must be a P_{L,S}-number.
    pub almost_prime: Option<(u32, PrimeSetS)>,
}

impl SolutionConstraint {
    pub fn none() -> Self {
        SolutionConstraint::default()
    }

    pub fn with_divisors(d: &[u64]) -> Self {
        SolutionConstraint {
            divisors: Some(d.to_vec()),
            ..Default::default()
        }
    }

    fn validate(&self, ell: usize) -> Result<()> {
        if let Some(d) = &self.divisors {
            if d.len() != ell {
                return Err(Error::Invalid(format!(
                    "divisor vector has length {}, expected {}",
                    d.len(),
                    ell
                )));
            }
            for &dj in d {
                if dj == 0 || !arith::is_squarefree(dj) {
                    return Err(Error::NotSquarefree(dj));
                }
            }
        }
        Ok(())
    }

    fn admits(&self, j: usize, nj: i64) -> bool {
        if nj == 0 {
            // still subject to divisibility (trivially satisfied at 0)
            return true;
        }
        if let Some(d) = &self.divisors {
            if nj.rem_euclid(d[j] as i64) != 0 {
                return false;
            }
        }
        if let Some(q) = self.gcd_modulus {
            if gcd_u128(nj.unsigned_abs() as u128, q) != 1 {
                return false;
            }
        }
        if let Some((l, s)) = &self.almost_prime {
            if !arith::is_almost_prime(nj as i128, *l, s) {
                return false;
            }
        }
        true
    }

    fn divisor(&self, j: usize) -> i64 {
        self.divisors
            .as_ref()
            .map(|d| d[j] as i64)
            .unwrap_or(1)
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn isqrt(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// All solutions (n_1, ..., n_ℓ) of Σ a_j p_m(n_j) = n satisfying the
/// constraint, in lexicographic order. Coordinate ranges come from the
/// exact inequality a_j N_j² ≤ 8(m-2)·rem + a_j (m-4)².
pub fn enumerate_representations(
    prob: &PolygonalProblem,
    c: &SolutionConstraint,
) -> Result<Vec<Vec<i64>>> {
    c.validate(prob.ell())?;
    let mut out = Vec::new();
    let mut current = vec![0i64; prob.ell()];
    recurse(prob, c, 0, prob.n as i128, &mut current, &mut out);
    Ok(out)
}

fn coordinate_range(m: i128, aj: i128, rem: i128) -> (i64, i64) {
    // a_j N² ≤ 8(m-2)·rem + a_j(m-4)², N = 2(m-2)x + 4 - m
    let t = 8 * (m - 2) * rem + aj * (m - 4) * (m - 4);
    let nmax = isqrt(t / aj);
    let two_m2 = 2 * (m - 2);
    let lo = div_ceil_i128(-nmax - (4 - m), two_m2);
    let hi = div_floor_i128(nmax - (4 - m), two_m2);
    (lo as i64, hi as i64)
}

fn div_floor_i128(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && (a < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

fn div_ceil_i128(a: i128, b: i128) -> i128 {
    -div_floor_i128(-a, b)
}

fn recurse(
    prob: &PolygonalProblem,
    c: &SolutionConstraint,
    j: usize,
    rem: i128,
    current: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let m = prob.m as i128;
    let aj = prob.a[j] as i128;
    let dj = c.divisor(j);
    if j + 1 == prob.ell() {
        // solve a_ℓ p_m(x) = rem exactly
        let t = 8 * (m - 2) * rem;
        if t % aj != 0 {
            return;
        }
        let s = t / aj + (m - 4) * (m - 4);
        let r = isqrt(s);
        if r < 0 || r * r != s {
            return;
        }
        let two_m2 = 2 * (m - 2);
        let mut xs: Vec<i64> = Vec::with_capacity(2);
        for nv in [-r, r] {
            let num = nv - (4 - m);
            if num.rem_euclid(two_m2) == 0 {
                let x = (num / two_m2) as i64;
                if x % dj == 0 && c.admits(j, x) && !xs.contains(&x) {
                    xs.push(x);
                }
            }
        }
        xs.sort_unstable();
        for x in xs {
            current[j] = x;
            out.push(current.clone());
        }
        return;
    }
    let (lo, hi) = coordinate_range(m, aj, rem);
    let start = div_ceil_i128(lo as i128, dj as i128) * dj as i128;
    let mut x = start as i64;
    while x <= hi {
        if c.admits(j, x) {
            let v = aj * {
                let n = x as i128;
                ((m - 2) * n * n + (4 - m) * n) / 2
            };
            if v <= rem {
                current[j] = x;
                recurse(prob, c, j + 1, rem - v, current, out);
            }
        }
        x += dj;
    }
}

/// #{solutions with d_j | n_j for every j}.
pub fn count_with_divisibility(prob: &PolygonalProblem, d: &[u64]) -> Result<u64> {
    let reps = enumerate_representations(prob, &SolutionConstraint::with_divisors(d))?;
    Ok(reps.len() as u64)
}

/// Unconstrained representation count.
pub fn count_representations(prob: &PolygonalProblem) -> Result<u64> {
    Ok(enumerate_representations(prob, &SolutionConstraint::none())?.len() as u64)
}

/// For each 1 ≤ n ≤ n_max, the minimum of ord_2(x_j) over all solutions of
/// x_1² + x_2² + x_3² + x_4² = 2^n and all nonzero coordinates, found by
/// exhaustive enumeration of sorted nonnegative representatives.
pub fn two_power_four_square_valuations(n_max: u32) -> Result<Vec<(u32, u32)>> {
    if n_max > 24 {
        return Err(Error::Invalid(format!(
            "two-power table capped at n = 24, got {n_max}"
        )));
    }
    let mut table = Vec::new();
    for n in 1..=n_max {
        let t = 1i128 << n;
        let mut min_ord: Option<u32> = None;
        // x4 ≥ x3 ≥ x2 ≥ x1 ≥ 0
        let x4_hi = isqrt(t);
        let x4_lo = {
            let mut v = isqrt(t / 4);
            while v * v * 4 < t {
                v += 1;
            }
            v
        };
        for x4 in x4_lo..=x4_hi {
            let r3 = t - x4 * x4;
            let x3_hi = isqrt(r3).min(x4);
            let mut x3_lo = isqrt(r3 / 3);
            while x3_lo * x3_lo * 3 < r3 {
                x3_lo += 1;
            }
            for x3 in x3_lo..=x3_hi {
                let r2 = r3 - x3 * x3;
                let x2_hi = isqrt(r2).min(x3);
                let mut x2_lo = isqrt(r2 / 2);
                while x2_lo * x2_lo * 2 < r2 {
                    x2_lo += 1;
                }
                for x2 in x2_lo..=x2_hi {
                    let r1 = r2 - x2 * x2;
                    let x1 = isqrt(r1);
                    if x1 * x1 != r1 || x1 > x2 {
                        continue;
                    }
                    let ord = [x1, x2, x3, x4]
                        .into_iter()
                        .filter(|&x| x != 0)
                        .map(|x| arith::valuation(x, 2))
                        .min()
                        .expect("2^n > 0 forces a nonzero coordinate");
                    min_ord = Some(min_ord.map_or(ord, |m| m.min(ord)));
                }
            }
        }
        table.push((n, min_ord.expect("2^n is a sum of four squares")));
    }
    Ok(table)
}
