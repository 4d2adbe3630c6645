//! Eisenstein coefficient of the shifted theta series as a product of local
//! densities, in two independently assembled factorizations:
//!
//! * the index/density product
//!   a_E(h) = (2π)^{ℓ/2} h^{ℓ/2-1} / (√([L_X^#:L_X]) Γ(ℓ/2)) · ∏_p β_p(h;X),
//!   with the Euler tail truncated under a rigorous bound, and
//! * the L-function form
//!   a_E(h) = (2π)² h / (√(16 d_L) Γ(2) L(2,ψ)) · ∏ finite correction factors,
//!
//! plus the explicit lower bound for the listed coefficient vectors, the
//! cuspidal residual R(d,n) = r_Q(n) - a_E(n), and its explicit (very
//! lossy) bound, evaluated in log10 domain.
//!
//! The character ψ is the Kronecker character of the fundamental
//! discriminant attached to the square class of ∏ a_j (for ℓ = 4; the
//! negative of it for ℓ = 6). The 2-adic factor β_2 comes from the
//! counting oracle, since the formula engine is odd-prime only.

use crate::arith;
use crate::interval::Enclosure;
use crate::lattice::ShiftedLattice;
use crate::localdensity::{self, oracle};
use crate::polygonal::PolygonalProblem;
use crate::{rat, Error, Rat, Result};
use num_traits::ToPrimitive;

/// Everything needed to evaluate a_E(h) for a fixed shifted lattice:
/// the bad-prime set, the character ψ, a prime table for the Euler
/// products, and the enclosure of L(ℓ/2, ψ).
#[derive(Debug, Clone)]
pub struct EisensteinContext {
    pub m: u32,
    pub a: Vec<u64>,
    pub d: Vec<u64>,
    /// odd primes dividing 2(m-2)(m-4) ∏ a_j d_j
    pub bad_primes: Vec<u64>,
    /// fundamental discriminant defining ψ
    pub psi_disc: i128,
    pub euler_cutoff: u64,
    primes: Vec<u64>,
    psi_table: Vec<i8>,
}

impl EisensteinContext {
    pub fn new(m: u32, a: &[u64], d: &[u64]) -> Result<Self> {
        Self::with_cutoff(m, a, d, 2_000_000)
    }

    pub fn with_cutoff(m: u32, a: &[u64], d: &[u64], euler_cutoff: u64) -> Result<Self> {
        let ell = a.len();
        if ell != 4 && ell != 6 {
            return Err(Error::UnsupportedRank(ell));
        }
        if d.len() != ell {
            return Err(Error::BadCoefficients);
        }
        let mi = m as i128;
        let mut bad: i128 = 2 * (mi - 2) * (mi - 4).max(1);
        for (&aj, &dj) in a.iter().zip(d) {
            bad *= aj as i128 * dj as i128;
        }
        let bad_primes: Vec<u64> = arith::factorize(bad.max(1))?
            .factors
            .iter()
            .map(|&(p, _)| p)
            .filter(|&p| p != 2)
            .collect();
        let prod_a: i128 = a.iter().map(|&x| x as i128).product();
        let mut kernel = squarefree_kernel(prod_a);
        if ell % 4 == 2 {
            kernel = -kernel;
        }
        let psi_disc = fundamental_discriminant(kernel);
        let primes = arith::primes_up_to(euler_cutoff);
        let period = psi_disc.unsigned_abs() as usize;
        let psi_table = (0..period)
            .map(|r| arith::kronecker(psi_disc, r as i128))
            .collect();
        Ok(EisensteinContext {
            m,
            a: a.to_vec(),
            d: d.to_vec(),
            bad_primes,
            psi_disc,
            euler_cutoff,
            primes,
            psi_table,
        })
    }

    pub fn ell(&self) -> usize {
        self.a.len()
    }

    pub fn psi(&self, n: u64) -> i8 {
        self.psi_table[(n as usize) % self.psi_table.len()]
    }

    /// Enclosure of L(ℓ/2, ψ) by truncated Euler product with tail bound
    /// Σ_{p > P} p^{-ℓ/2} < 1/(P-1).
    pub fn l_value(&self) -> Enclosure {
        let s = (self.ell() / 2) as i32;
        let mut acc = Enclosure::exact(1.0);
        for &p in &self.primes {
            let chi = self.psi(p) as f64;
            if chi == 0.0 {
                continue;
            }
            let factor = Enclosure::exact(1.0 - chi * (p as f64).powi(-s)).recip();
            acc = acc.mul(&factor);
        }
        acc.widen_exp(2.0 / (self.euler_cutoff as f64 - 1.0))
    }

    /// Leading factor (2π)^{ℓ/2} h^{ℓ/2-1} / (√([L_X^#:L_X]) Γ(ℓ/2)).
    fn leading(&self, h: &Rat) -> Result<Enclosure> {
        let ell = self.ell();
        let lat = ShiftedLattice::build(self.m, &self.a, &self.d)?;
        let index = lat.dual_index().to_f64().expect("finite index");
        let sqrt_index = Enclosure::new(
            index.sqrt().next_down().next_down(),
            index.sqrt().next_up().next_up(),
        );
        let two_pi_pow = powi(&Enclosure::exact(std::f64::consts::TAU), ell as i32 / 2);
        let gamma = if ell == 4 { 1.0 } else { 2.0 };
        let hf = Enclosure::from_rational(h);
        let h_pow = powi(&hf, ell as i32 / 2 - 1);
        Ok(two_pi_pow.mul(&h_pow).div(&sqrt_index).scale(1.0 / gamma))
    }

    fn h_times_4(&self, h: &Rat) -> Result<i128> {
        let scaled = h * rat(4);
        if !scaled.is_integer() {
            return Err(Error::Invalid("h must lie in (1/4)Z".into()));
        }
        i128::try_from(&scaled.to_integer())
            .map_err(|_| Error::Invalid("h out of desk-scale range".into()))
    }

    /// The exact-factor prime set: the bad primes and the odd primes
    /// dividing the target (2 is always handled exactly).
    fn exact_primes(&self, h4: i128) -> Result<Vec<u64>> {
        let mut set: Vec<u64> = self.bad_primes.clone();
        if h4 != 0 {
            for (p, _) in arith::factorize(h4)?.factors {
                if p != 2 && !set.contains(&p) {
                    set.push(p);
                }
            }
        }
        set.sort_unstable();
        Ok(set)
    }

    /// a_E(h) via the index/density product: exact β_p over 2, the bad
    /// primes and p | h; generic Euler factors 1 - ψ(p) p^{-ℓ/2} for the
    /// rest up to the cutoff; rigorous tail widening beyond.
    pub fn coefficient(&self, h: &Rat) -> Result<Enclosure> {
        let h4 = self.h_times_4(h)?;
        if h4 <= 0 {
            return Err(Error::Invalid("h must be positive".into()));
        }
        let s = (self.ell() / 2) as i32;
        let exact = self.exact_primes(h4)?;
        let mut prod = Enclosure::from_rational(&beta_2(self.m, &self.a, &self.d, h4)?);
        for &p in &exact {
            // the raw counting density in lattice coordinates is the
            // Euler factor matching the √(∏ 2 b_j) leading constant
            let beta = localdensity::density_general(self.m, &self.a, &self.d, p, h4)?;
            prod = prod.mul(&Enclosure::from_rational(&beta));
        }
        for &p in &self.primes {
            if p == 2 || exact.binary_search(&p).is_ok() {
                continue;
            }
            let chi = self.psi(p) as f64;
            prod = prod.mul(&Enclosure::exact(1.0 - chi * (p as f64).powi(-s)));
        }
        let prod = prod.widen_exp(2.0 / (self.euler_cutoff as f64 - 1.0));
        Ok(self.leading(h)?.mul(&prod))
    }

    /// a_E(h) assembled through L(2,ψ): the generic Euler factors enter as
    /// 1/L times finite corrections β_p / (1 - ψ(p) p^{-2}) at p | e_1 and
    /// at odd p | h with p ∤ e_1 (m-4). Rank-4 only.
    pub fn coefficient_l_form(&self, h: &Rat) -> Result<Enclosure> {
        if self.ell() != 4 {
            return Err(Error::UnsupportedRank(self.ell()));
        }
        let h4 = self.h_times_4(h)?;
        if h4 <= 0 {
            return Err(Error::Invalid("h must be positive".into()));
        }
        let mi = self.m as i128;
        let e1: i128 = 2 * (mi - 2) * self.a.iter().map(|&x| x as i128).product::<i128>();
        let mut finite_set: Vec<u64> = arith::factorize(e1)?
            .factors
            .iter()
            .map(|&(p, _)| p)
            .collect();
        for (p, _) in arith::factorize(h4)?.factors {
            if p != 2
                && e1 % p as i128 != 0
                && (mi - 4).rem_euclid(p as i128) != 0
                && !finite_set.contains(&p)
            {
                finite_set.push(p);
            }
        }
        finite_set.sort_unstable();
        let mut prod = self.l_value().recip();
        for &p in &finite_set {
            let beta = if p == 2 {
                Enclosure::from_rational(&beta_2(self.m, &self.a, &self.d, h4)?)
            } else {
                Enclosure::from_rational(&localdensity::density_general(
                    self.m, &self.a, &self.d, p, h4,
                )?)
            };
            let chi = self.psi(p) as f64;
            let euler = Enclosure::exact(1.0 - chi * (p as f64).powi(-2));
            prod = prod.mul(&beta.div(&euler));
        }
        Ok(self.leading(h)?.mul(&prod))
    }
}

fn powi(e: &Enclosure, k: i32) -> Enclosure {
    let mut acc = Enclosure::exact(1.0);
    for _ in 0..k.unsigned_abs() {
        acc = acc.mul(e);
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

fn squarefree_kernel(n: i128) -> i128 {
    let f = arith::factorize(n).expect("nonzero");
    let mut k: i128 = f.sign as i128;
    for (p, e) in f.factors {
        if e % 2 == 1 {
            k *= p as i128;
        }
    }
    k
}

/// Fundamental discriminant of Q(√n): kernel if ≡ 1 (mod 4), else 4·kernel.
pub fn fundamental_discriminant(n: i128) -> i128 {
    let k = squarefree_kernel(n);
    if k.rem_euclid(4) == 1 {
        k
    } else {
        4 * k
    }
}

/// The 2-adic Euler factor, from the counting oracle. The oracle counts
/// the cleared congruence Σ a_j N_j² ≡ 4h, which overcounts the lattice-
/// coordinate density by exactly 4 at p = 2 (and by a unit elsewhere);
/// the depth is raised until two consecutive depths agree.
pub fn beta_2(m: u32, a: &[u64], d: &[u64], h_times_4: i128) -> Result<Rat> {
    if h_times_4 == 0 {
        return Err(Error::Invalid("2-adic factor needs a nonzero target".into()));
    }
    let r2 = arith::valuation(h_times_4, 2);
    let mut k = r2 + 5;
    let b2 = loop {
        match oracle::density_oracle_stable(m, a, d, 2, h_times_4, k) {
            Ok(v) => break v,
            Err(Error::OracleUnstable { .. }) if k < 22 => k += 1,
            Err(e) => return Err(e),
        }
    };
    Ok(b2 * localdensity::gaussian::pow_rat(2, -2))
}

/// Explicit lower bound for a_E over the listed coefficient vectors:
/// 9 / (26000 (m-2)^{3+1e-6}) · h^{1-1e-6}, evaluated in log domain.
pub fn eisenstein_lower_bound(m: u32, a: &[u64], h: f64) -> Result<f64> {
    let list = localdensity::xbound_coefficients();
    let mut key: Vec<u64> = a.to_vec();
    key.sort_unstable();
    let found = list.iter().any(|row| {
        let mut r = row.to_vec();
        r.sort_unstable();
        r == key
    });
    if !found {
        return Err(Error::NotInCoefficientList(a.to_vec()));
    }
    let ln = 9f64.ln() - 26000f64.ln() - (3.0 + 1e-6) * ((m as f64) - 2.0).ln()
        + (1.0 - 1e-6) * h.ln();
    Ok(ln.exp())
}

/// Conductor-style inputs of the cuspidal bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspBoundInputs {
    /// N_{a,d²} = 16 (m-2)² lcm(a) lcm(d)²
    pub level: i128,
    /// M_{a,d²} = 2 (m-2) lcm(d) / gcd(m-4, lcm(d))
    pub shift_level: i128,
}

impl CuspBoundInputs {
    pub fn new(m: u32, a: &[u64], d: &[u64]) -> Self {
        let mi = m as i128;
        let lcm = |xs: &[u64]| -> i128 {
            xs.iter()
                .map(|&x| x as i128)
                .fold(1i128, |acc, x| acc / gcd_i128(acc, x) * x)
        };
        let la = lcm(a);
        let ld = lcm(d);
        CuspBoundInputs {
            level: 16 * (mi - 2) * (mi - 2) * la * ld * ld,
            shift_level: 2 * (mi - 2) * ld / gcd_i128(mi - 4, ld).max(1),
        }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// log10 of the explicit cuspidal-sum bound
/// 2.04e-64 (m-2)^{6+2/10+1/100+6e-6} h^{17/30} D^{28.85}.
pub fn cusp_bound_log10(m: u32, h: f64, d_level: f64) -> f64 {
    let expo = 6.0 + 2.0 / 10.0 + 1.0 / 100.0 + 6e-6;
    (2.04e-64f64).log10()
        + expo * ((m as f64) - 2.0).log10()
        + (17.0 / 30.0) * h.log10()
        + 28.85 * d_level.log10()
}

/// Exact representation count, Eisenstein enclosure and their difference
/// R(d,n) = r_{Q_{a·d²}}(n) - a_E(n) for the shifted lattice X_d.
#[derive(Debug, Clone)]
pub struct CuspResidual {
    pub count: u64,
    pub eisenstein: Enclosure,
    pub residual: Enclosure,
    pub h: Rat,
}

pub fn cusp_residual(m: u32, a: &[u64], d: &[u64], n: i64) -> Result<CuspResidual> {
    cusp_residual_with_cutoff(m, a, d, n, 200_000)
}

pub fn cusp_residual_with_cutoff(
    m: u32,
    a: &[u64],
    d: &[u64],
    n: i64,
    cutoff: u64,
) -> Result<CuspResidual> {
    let prob = PolygonalProblem::new(m, a, n)?;
    let h = prob.scaled_target().h_quarter;
    let lat = ShiftedLattice::build(m, a, d)?;
    let count = lat.count_points(&h);
    let ctx = EisensteinContext::with_cutoff(m, a, d, cutoff)?;
    let ae = ctx.coefficient(&h)?;
    let residual = Enclosure::exact(count as f64).sub(&ae);
    Ok(CuspResidual {
        count,
        eisenstein: ae,
        residual,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn discriminant_and_character() {
        // a = (1,1,1,1): kernel 1, disc 1, ψ trivial
        let ctx = EisensteinContext::with_cutoff(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 10_000).unwrap();
        assert_eq!(ctx.psi_disc, 1);
        assert_eq!(ctx.psi(7), 1);
        // a = (1,1,2,4): kernel 2, disc 8, ψ = (8/·) = (2/·)
        let ctx = EisensteinContext::with_cutoff(5, &[1, 1, 2, 4], &[1, 1, 1, 1], 10_000).unwrap();
        assert_eq!(ctx.psi_disc, 8);
        assert_eq!(ctx.psi(7), 1);
        assert_eq!(ctx.psi(5), -1);
        assert_eq!(ctx.psi(2), 0);
    }

    #[test]
    fn l_value_trivial_character_is_zeta_two() {
        let ctx = EisensteinContext::with_cutoff(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 200_000).unwrap();
        let l = ctx.l_value();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(l.contains(zeta2), "{l:?} should contain {zeta2}");
        assert!(l.rel_width() < 1e-4);
    }

    #[test]
    fn beta_2_positive_on_real_targets() {
        let b = beta_2(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 28).unwrap();
        assert!(b > Rat::zero());
        let b0 = beta_2(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 4).unwrap();
        assert!(b0 > Rat::zero());
    }

    #[test]
    fn coefficient_routes_agree_small() {
        let ctx =
            EisensteinContext::with_cutoff(11, &[1, 1, 1, 1], &[1, 1, 1, 1], 100_000).unwrap();
        for n in [1i64, 2, 3, 10] {
            let prob = PolygonalProblem::new(11, &[1, 1, 1, 1], n).unwrap();
            let h = prob.scaled_target().h_quarter;
            let h4 = (&h * rat(4)).to_integer();
            if (&h4 % crate::Int::from(7)).is_zero() {
                continue; // avoid the (m-4)-gap of the reference L-form
            }
            let a1 = ctx.coefficient(&h).unwrap();
            let a2 = ctx.coefficient_l_form(&h).unwrap();
            assert!(
                a1.overlaps(&a2) || (a1.mid() - a2.mid()).abs() / a1.mid() < 1e-4,
                "n={n}: {a1:?} vs {a2:?}"
            );
        }
    }

    #[test]
    fn coefficient_tracks_counts() {
        // a_E should be close to the exact count (the cusp part is small
        // for the pentagonal sum of four)
        let r = cusp_residual_with_cutoff(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 20, 100_000).unwrap();
        assert!(r.count > 0);
        assert!(r.eisenstein.mid() > 0.0);
        let rel = r.residual.mid().abs() / r.eisenstein.mid();
        assert!(rel < 0.8, "relative residual {rel} unexpectedly large");
    }

    #[test]
    fn residual_window_mean_reported() {
        // averaged over a window of n, the residual is small next to the
        // Eisenstein term; reported, not asserted (the tolerance is an
        // empirical observation, not something the exact bounds force at this scale)
        let (m, a, d) = (5u32, [1u64, 1, 1, 1], [1u64, 1, 1, 1]);
        let mut sum_r = 0.0;
        let mut sum_e = 0.0;
        for n in 50..80i64 {
            let r = cusp_residual_with_cutoff(m, &a, &d, n, 50_000).unwrap();
            sum_r += r.residual.mid();
            sum_e += r.eisenstein.mid();
        }
        println!(
            "window mean residual / mean eisenstein = {:.4}",
            sum_r.abs() / (sum_e / 30.0)
        );
        assert!(sum_e > 0.0);
    }

    #[test]
    fn doubling_h_roughly_doubles_coefficient() {
        // ℓ = 4 has h^{ℓ/2-1} = h in the leading factor, so two admissible
        // targets with identical bad-prime data (here both prime, coprime
        // to 6) and ratio ≈ 2 give coefficients in ratio ≈ 2
        let ctx = EisensteinContext::with_cutoff(5, &[1, 1, 1, 1], &[1, 1, 1, 1], 50_000).unwrap();
        let a1 = ctx.coefficient(&crate::rat(31)).unwrap(); // n = 5
        let a2 = ctx.coefficient(&crate::rat(61)).unwrap(); // n = 10
        let ratio = a2.mid() / a1.mid();
        let expect = 61.0 / 31.0;
        assert!((ratio - expect).abs() / expect < 0.1, "ratio {ratio}");
    }

    #[test]
    fn lower_bound_examples() {
        let v = eisenstein_lower_bound(11, &[1, 1, 1, 1], 1000.0).unwrap();
        assert!((v - 4.75e-4).abs() / 4.75e-4 < 0.01, "{v}");
        // increasing in h, decreasing in m
        assert!(eisenstein_lower_bound(11, &[1, 1, 1, 1], 2000.0).unwrap() > v);
        assert!(eisenstein_lower_bound(13, &[1, 1, 1, 1], 1000.0).unwrap() < v);
        assert!(matches!(
            eisenstein_lower_bound(11, &[3, 3, 3, 3], 10.0),
            Err(Error::NotInCoefficientList(_))
        ));
    }

    #[test]
    fn cusp_bound_log_examples() {
        // all power factors 1 at m=3, h=1, D=1
        let v = cusp_bound_log10(3, 1.0, 1.0);
        assert!((v - (2.04e-64f64).log10()).abs() < 1e-12);
        // the displayed log arithmetic at m=11, h=1e6, D=5^27
        let d = 5f64.powi(27);
        let got = cusp_bound_log10(11, 1e6, d);
        let expect = (2.04e-64f64).log10()
            + (6.0 + 0.2 + 0.01 + 6e-6) * 9f64.log10()
            + (17.0 / 30.0) * 6.0
            + 28.85 * 27.0 * 5f64.log10();
        assert!((got - expect).abs() < 1e-9);
        // monotone in each argument
        assert!(cusp_bound_log10(13, 1e6, d) > got);
        assert!(cusp_bound_log10(11, 2e6, d) > got);
        assert!(cusp_bound_log10(11, 1e6, 2.0 * d) > got);
    }

    #[test]
    fn cusp_inputs() {
        let c = CuspBoundInputs::new(11, &[1, 2, 3, 4], &[1, 1, 1, 1]);
        assert_eq!(c.level, 16 * 81 * 12);
        assert_eq!(c.shift_level, 2 * 9);
    }
}
