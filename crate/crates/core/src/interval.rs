//! Minimal directed-rounding interval type for the analytic parts of the
//! Eisenstein computation. Every arithmetic result is widened by one ulp
//! on each side, so a true value contained in the inputs stays contained.

use crate::Rat;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn exact(v: f64) -> Self {
        Enclosure { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn from_rational(r: &Rat) -> Self {
        let v = r.to_f64().expect("finite rational");
        Enclosure {
            lo: v.next_down(),
            hi: v.next_up(),
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Width relative to the midpoint magnitude.
    pub fn rel_width(&self) -> f64 {
        let m = self.mid().abs();
        if m == 0.0 {
            self.width()
        } else {
            self.width() / m
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, o: &Enclosure) -> Self {
        Enclosure {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    pub fn sub(&self, o: &Enclosure) -> Self {
        Enclosure {
            lo: (self.lo - o.hi).next_down(),
            hi: (self.hi - o.lo).next_up(),
        }
    }

    pub fn mul(&self, o: &Enclosure) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Enclosure {
            lo: c.iter().copied().fold(f64::INFINITY, f64::min).next_down(),
            hi: c.iter().copied().fold(f64::NEG_INFINITY, f64::max).next_up(),
        }
    }

    /// Reciprocal; requires the interval to exclude zero.
    pub fn recip(&self) -> Self {
        assert!(
            self.lo > 0.0 || self.hi < 0.0,
            "reciprocal of an interval containing zero"
        );
        Enclosure {
            lo: (1.0 / self.hi).next_down(),
            hi: (1.0 / self.lo).next_up(),
        }
    }

    pub fn div(&self, o: &Enclosure) -> Self {
        self.mul(&o.recip())
    }

    pub fn scale(&self, k: f64) -> Self {
        self.mul(&Enclosure::exact(k))
    }

    pub fn abs(&self) -> Self {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            Enclosure {
                lo: -self.hi,
                hi: -self.lo,
            }
        } else {
            Enclosure {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }

    /// Multiply by an interval [e^-eps, e^eps]; used for truncation tails.
    pub fn widen_exp(&self, eps: f64) -> Self {
        debug_assert!(eps >= 0.0 && self.lo >= 0.0);
        let up = (eps).exp();
        let down = (-eps).exp();
        Enclosure {
            lo: (self.lo * down).next_down(),
            hi: (self.hi * up).next_up(),
        }
    }
}
