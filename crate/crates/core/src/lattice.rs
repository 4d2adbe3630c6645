//! Shifted-lattice model X_d = L_d + ν_d for the polygonal representation
//! problem: diagonal Gram matrix b_j = a_j (m-2)² d_j², shift with every
//! coordinate equal to (4-m)/2 in the ambient orthogonal basis, dual index,
//! point counting and theta coefficients.
//!
//! Points of X_d are parameterized by x ∈ Z^ℓ through
//! N_j = 2(m-2) d_j x_j + 4 - m, with 4·Q(v) = Σ a_j N_j².

use crate::arith;
use crate::{ratio, Error, Rat, Result};
use num_bigint::BigUint;
use num_traits::Signed;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedLattice {
    pub m: u32,
    pub a: Vec<u64>,
    pub d: Vec<u64>,
    /// b_j = a_j (m-2)² d_j²
    pub gram_diag: Vec<i128>,
    /// s_j = (4-m) / (2(m-2) d_j), the shift in the v_{d,j} basis
    pub shift_coeffs: Vec<Rat>,
}

impl ShiftedLattice {
    pub fn build(m: u32, a: &[u64], d: &[u64]) -> Result<Self> {
        if m < 3 {
            return Err(Error::PolygonOrder(m));
        }
        if a.is_empty() || a.len() > 8 || a.len() != d.len() || a.iter().any(|&x| x == 0) {
            return Err(Error::BadCoefficients);
        }
        for &dj in d {
            if dj == 0 || !arith::is_squarefree(dj) {
                return Err(Error::NotSquarefree(dj));
            }
        }
        let mi = m as i128;
        let gram_diag = a
            .iter()
            .zip(d)
            .map(|(&aj, &dj)| aj as i128 * (mi - 2) * (mi - 2) * dj as i128 * dj as i128)
            .collect();
        let shift_coeffs = d
            .iter()
            .map(|&dj| ratio(4 - mi, 2 * (mi - 2) * dj as i128))
            .collect();
        Ok(ShiftedLattice {
            m,
            a: a.to_vec(),
            d: d.to_vec(),
            gram_diag,
            shift_coeffs,
        })
    }

    pub fn ell(&self) -> usize {
        self.a.len()
    }

    /// [L_X^# : L_X] = ∏ 2 a_j (m-2)² d_j² = ∏ 2 b_j.
    pub fn dual_index(&self) -> BigUint {
        self.gram_diag
            .iter()
            .map(|&b| BigUint::from((2 * b) as u128))
            .product()
    }

    /// Q(ν_d) = Σ b_j s_j² = ((m-4)/2)² Σ a_j, the value at the shift
    /// image of the zero vector.
    pub fn q_of_shift(&self) -> Rat {
        let m = self.m as i128;
        let sum_a: i128 = self.a.iter().map(|&x| x as i128).sum();
        ratio((m - 4) * (m - 4) * sum_a, 4)
    }

    /// Exact number of v ∈ L_d + ν_d with Q(v) = value. Values outside
    /// (1/4)·Z_{≥0} have count 0.
    pub fn count_points(&self, value: &Rat) -> u64 {
        match self.integral_target(value) {
            Some(h4) => {
                let mut count = 0u64;
                self.walk(0, h4, &mut |_| count += 1);
                count
            }
            None => 0,
        }
    }

    /// All theta coefficients of Θ_X up to h_max: map 4·Q(v) → count.
    pub fn theta_coefficients(&self, h_max: &Rat) -> BTreeMap<i128, u64> {
        let mut out = BTreeMap::new();
        if h_max.is_negative() {
            return out;
        }
        let cap = (h_max * crate::rat(4)).floor().to_integer();
        let cap: i128 = i128::try_from(&cap).expect("desk-scale h_max");
        self.collect_theta(0, cap, 0, &mut out);
        out
    }

    fn integral_target(&self, value: &Rat) -> Option<i128> {
        if value.is_negative() {
            return None;
        }
        let scaled = value * crate::rat(4);
        if !scaled.is_integer() {
            return None;
        }
        i128::try_from(&scaled.to_integer()).ok()
    }

    /// Visit every x ∈ Z^ℓ with Σ a_j N_j(x)² = rem, recursing coordinate
    /// by coordinate over the admissible congruence class of N_j.
    fn walk(&self, j: usize, rem: i128, visit: &mut impl FnMut(&[i64])) {
        let mut coords = vec![0i64; self.ell()];
        self.walk_inner(j, rem, &mut coords, visit);
    }

    fn walk_inner(
        &self,
        j: usize,
        rem: i128,
        coords: &mut Vec<i64>,
        visit: &mut impl FnMut(&[i64]),
    ) {
        let m = self.m as i128;
        let aj = self.a[j] as i128;
        let step = 2 * (m - 2) * self.d[j] as i128;
        let offset = 4 - m;
        if j + 1 == self.ell() {
            // a_ℓ N² = rem with N ≡ 4-m (mod step)
            if rem % aj != 0 {
                return;
            }
            let s = rem / aj;
            let r = isqrt(s);
            if r < 0 || r * r != s {
                return;
            }
            let mut xs: Vec<i64> = Vec::with_capacity(2);
            for nv in [-r, r] {
                if (nv - offset).rem_euclid(step) == 0 {
                    let x = ((nv - offset) / step) as i64;
                    if !xs.contains(&x) {
                        xs.push(x);
                    }
                }
            }
            xs.sort_unstable();
            for x in xs {
                coords[j] = x;
                visit(coords);
            }
            return;
        }
        let nmax = isqrt(rem / aj);
        let lo = div_ceil(-nmax - offset, step);
        let hi = div_floor(nmax - offset, step);
        for x in lo..=hi {
            let nv = step * x + offset;
            let v = aj * nv * nv;
            if v <= rem {
                coords[j] = x as i64;
                self.walk_inner(j + 1, rem - v, coords, visit);
            }
        }
    }

    fn collect_theta(&self, j: usize, cap: i128, acc: i128, out: &mut BTreeMap<i128, u64>) {
        let m = self.m as i128;
        let aj = self.a[j] as i128;
        let step = 2 * (m - 2) * self.d[j] as i128;
        let offset = 4 - m;
        let rem = cap - acc;
        let nmax = isqrt(rem / aj);
        let lo = div_ceil(-nmax - offset, step);
        let hi = div_floor(nmax - offset, step);
        for x in lo..=hi {
            let nv = step * x + offset;
            let v = aj * nv * nv;
            if acc + v > cap {
                continue;
            }
            if j + 1 == self.ell() {
                *out.entry(acc + v).or_insert(0) += 1;
            } else {
                self.collect_theta(j + 1, cap, acc + v, out);
            }
        }
    }
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

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && (a < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygonal::{self, PolygonalProblem};
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        let x = ShiftedLattice::build(5, &[1, 1, 1, 1], &[1, 1, 1, 1]).unwrap();
        assert_eq!(x.gram_diag, vec![9, 9, 9, 9]);

        let x = ShiftedLattice::build(5, &[1, 1, 1, 1], &[5, 1, 1, 1]).unwrap();
        assert_eq!(x.gram_diag, vec![225, 9, 9, 9]);

        // ν_d has every coordinate (4-m)/2 = -1/2 in the ambient basis:
        // s_j · (m-2) d_j = (4-m)/2
        let x = ShiftedLattice::build(5, &[1, 1, 1, 1], &[5, 1, 1, 1]).unwrap();
        for (sj, &dj) in x.shift_coeffs.iter().zip(&x.d) {
            assert_eq!(sj * crate::rat(3 * dj as i128), ratio(-1, 2));
        }

        assert!(ShiftedLattice::build(5, &[1, 1], &[4, 1]).is_err());
    }

    #[test]
    fn dual_index_examples() {
        let x = ShiftedLattice::build(5, &[1, 1, 1, 1], &[1, 1, 1, 1]).unwrap();
        assert_eq!(x.dual_index(), BigUint::from(104976u32)); // 18^4

        let x = ShiftedLattice::build(5, &[1, 2, 2, 5], &[1, 1, 1, 1]).unwrap();
        assert_eq!(x.dual_index(), BigUint::from(2099520u32));

        let x = ShiftedLattice::build(5, &[1], &[1]).unwrap();
        assert_eq!(x.dual_index(), BigUint::from(18u32));
    }

    #[test]
    fn dual_index_scales_by_p_squared() {
        let base = ShiftedLattice::build(11, &[1, 2, 3, 4], &[1, 1, 1, 1]).unwrap();
        let scaled = ShiftedLattice::build(11, &[1, 2, 3, 4], &[7, 1, 1, 1]).unwrap();
        assert_eq!(scaled.dual_index(), base.dual_index() * BigUint::from(49u32));
    }

    #[test]
    fn count_points_examples() {
        let x = ShiftedLattice::build(5, &[1, 1, 1, 1], &[1, 1, 1, 1]).unwrap();
        assert_eq!(x.count_points(&crate::rat(7)), 4);
        // the shift value corresponds to n = 0, which has the zero solution
        assert!(x.count_points(&x.q_of_shift()) >= 1);
        assert_eq!(x.count_points(&crate::rat(-3)), 0);
        // not in (1/4)Z
        assert_eq!(x.count_points(&ratio(1, 3)), 0);
    }

    #[test]
    fn theta_examples() {
        let x = ShiftedLattice::build(5, &[1, 1, 1, 1], &[1, 1, 1, 1]).unwrap();
        let theta = x.theta_coefficients(&crate::rat(30));
        // minimal value Q(ν) = 1 (key 4·Q = 4) attained only at the shift
        // image of zero
        let q4_min = x.q_of_shift() * crate::rat(4);
        assert_eq!(q4_min, crate::rat(4));
        assert_eq!(*theta.keys().next().unwrap(), 4);
        assert_eq!(theta[&4], 1);
        // counts are positive and partition the ball
        let total: u64 = theta.values().sum();
        let mut ball = 0u64;
        x.walk(0, 120, &mut |_| ball += 1);
        // walk counts the sphere of one value; recount the ball directly
        let ball_direct: u64 = (0..=120)
            .map(|v| x.count_points(&ratio(v, 4)))
            .sum();
        assert_eq!(total, ball_direct);
        let _ = ball;
    }

    #[test]
    fn q_values_quarter_integral() {
        let x = ShiftedLattice::build(11, &[1, 2, 3, 4], &[1, 5, 1, 7]).unwrap();
        let theta = x.theta_coefficients(&crate::rat(500));
        // keys are 4Q(v), so Q(v) ∈ (1/4)Z by construction; check they are
        // nonnegative and the minimum is positive (Q > 0 away from 0, and
        // 0 ∉ X_d since the shift is half-integral)
        assert!(theta.keys().all(|&k| k >= 0));
        assert!(*theta.keys().next().unwrap() > 0);
    }

    #[test]
    fn correspondence_with_polygonal_small() {
        for (m, a, d) in [
            (5u32, vec![1u64, 1, 1, 1], vec![1u64, 1, 1, 1]),
            (5, vec![1, 1, 1, 1], vec![5, 1, 1, 1]),
            (11, vec![1, 2, 3, 4], vec![1, 1, 7, 1]),
        ] {
            let x = ShiftedLattice::build(m, &a, &d).unwrap();
            for n in 0..25i64 {
                let prob = PolygonalProblem::new(m, &a, n).unwrap();
                let h = prob.scaled_target().h_quarter;
                assert_eq!(
                    u64::from(x.count_points(&h)),
                    polygonal::count_with_divisibility(&prob, &d).unwrap(),
                    "m={m} d={d:?} n={n}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn correspondence_random(m_i in 0usize..3, n in 0i64..40, di in 0usize..3) {
            let m = [5u32, 7, 11][m_i];
            let a = vec![1u64, 1, 2, 3];
            let mut d = vec![1u64, 1, 1, 1];
            d[di] = 5;
            let x = ShiftedLattice::build(m, &a, &d).unwrap();
            let prob = PolygonalProblem::new(m, &a, n).unwrap();
            let h = prob.scaled_target().h_quarter;
            prop_assert_eq!(
                x.count_points(&h),
                polygonal::count_with_divisibility(&prob, &d).unwrap()
            );
        }
    }
}
