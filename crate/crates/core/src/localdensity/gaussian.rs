//! Exact scalar of the form a + b·i + (c + d·i)·√p over the rationals.
//!
//! The local density terms mix fourth roots of unity (through ε_p) with
//! half-integral powers of p; each assembled density is rational, and the
//! evaluator asserts that the i and √p components cancel.

use crate::arith::QuarticUnit;
use crate::{rat, ratio, Rat};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq)]
pub struct SqrtScalar {
    pub p: u64,
    pub re: Rat,
    pub im: Rat,
    /// coefficient of √p
    pub sre: Rat,
    /// coefficient of i·√p
    pub sim: Rat,
}

impl SqrtScalar {
    pub fn zero(p: u64) -> Self {
        SqrtScalar {
            p,
            re: Rat::zero(),
            im: Rat::zero(),
            sre: Rat::zero(),
            sim: Rat::zero(),
        }
    }

    pub fn from_rat(p: u64, r: Rat) -> Self {
        SqrtScalar {
            p,
            re: r,
            im: Rat::zero(),
            sre: Rat::zero(),
            sim: Rat::zero(),
        }
    }

    pub fn from_int(p: u64, n: i128) -> Self {
        Self::from_rat(p, rat(n))
    }

    /// ε_p^k as a scalar (purely a fourth root of unity).
    pub fn from_eps_pow(p: u64, eps: QuarticUnit, k: u32) -> Self {
        let (re, im) = eps.pow(k);
        SqrtScalar {
            p,
            re: rat(re as i128),
            im: rat(im as i128),
            sre: Rat::zero(),
            sim: Rat::zero(),
        }
    }

    pub fn add(&self, o: &SqrtScalar) -> Self {
        debug_assert_eq!(self.p, o.p);
        SqrtScalar {
            p: self.p,
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            sre: &self.sre + &o.sre,
            sim: &self.sim + &o.sim,
        }
    }

    pub fn mul(&self, o: &SqrtScalar) -> Self {
        debug_assert_eq!(self.p, o.p);
        let p = rat(self.p as i128);
        // (x + y√p)(x' + y'√p) with complex x, y: re-part x x' + p y y',
        // √p-part x y' + y x', all over C = R + R·i
        let (a, b, c, d) = (&self.re, &self.im, &self.sre, &self.sim);
        let (e, f, g, h) = (&o.re, &o.im, &o.sre, &o.sim);
        SqrtScalar {
            p: self.p,
            re: a * e - b * f + (&p * (c * g - d * h)),
            im: a * f + b * e + (&p * (c * h + d * g)),
            sre: a * g - b * h + c * e - d * f,
            sim: a * h + b * g + c * f + d * e,
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        SqrtScalar {
            p: self.p,
            re: &self.re * r,
            im: &self.im * r,
            sre: &self.sre * r,
            sim: &self.sim * r,
        }
    }

    /// Multiply by p^{τ} where τ = tau2 / 2 may be half-integral of
    /// either sign.
    pub fn mul_pow_half(&self, tau2: i64) -> Self {
        let p = self.p as i128;
        let whole = tau2.div_euclid(2);
        let frac = tau2.rem_euclid(2);
        let scale = pow_rat(p, whole);
        let mut out = self.scale(&scale);
        if frac == 1 {
            // multiply by √p
            let pr = rat(p);
            out = SqrtScalar {
                p: self.p,
                re: &out.sre * &pr,
                im: &out.sim * &pr,
                sre: out.re,
                sim: out.im,
            };
        }
        out
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero() && self.sre.is_zero() && self.sim.is_zero()
    }

    pub fn rational_part(&self) -> Rat {
        self.re.clone()
    }
}

/// p^k as an exact rational, k of either sign.
pub fn pow_rat(p: i128, k: i64) -> Rat {
    if k >= 0 {
        rat(p.pow(k as u32))
    } else {
        ratio(1, p.pow((-k) as u32))
    }
}
