//! Outward-rounded f64 intervals and log-space accumulation.
//!
//! Elementary functions come from the platform libm; results are widened by a
//! few ulps on each side to cover its rounding.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::exactgeom::rat::{rat_to_f64, Rat};

const LIBM_ULPS: u32 = 4;

fn down(x: f64, n: u32) -> f64 {
    (0..n).fold(x, |v, _| v.next_down())
}

fn up(x: f64, n: u32) -> f64 {
    (0..n).fold(x, |v, _| v.next_up())
}

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Shortest round-trip decimal, so `1.0` reads "1"; exponent form when far
/// from unit scale.
pub fn fmt_dec(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || x.is_nan() || x.is_infinite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_dec(self.lo), fmt_dec(self.hi)].serialize(s)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "bad interval {lo} {hi}");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Enclosure of a rational.
    pub fn from_rat(q: &Rat) -> Self {
        let x = rat_to_f64(q);
        if x.is_finite() && Rat::from_float(x).as_ref() == Some(q) {
            return Interval::point(x);
        }
        Interval { lo: down(x, 2), hi: up(x, 2) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn exp(self) -> Interval {
        let lo = if self.lo == f64::NEG_INFINITY { 0.0 } else { down(self.lo.exp(), LIBM_ULPS).max(0.0) };
        Interval { lo, hi: up(self.hi.exp(), LIBM_ULPS) }
    }

    /// Natural log; requires a positive lower end for a finite result.
    pub fn ln(self) -> Interval {
        let lo = if self.lo <= 0.0 { f64::NEG_INFINITY } else { down(self.lo.ln(), LIBM_ULPS) };
        Interval { lo, hi: up(self.hi.ln(), LIBM_ULPS) }
    }

    pub fn ln_1p(self) -> Interval {
        Interval { lo: down(self.lo.ln_1p(), LIBM_ULPS), hi: up(self.hi.ln_1p(), LIBM_ULPS) }
    }

    pub fn sqr(self) -> Interval {
        if self.lo >= 0.0 {
            self * self
        } else if self.hi <= 0.0 {
            (-self) * (-self)
        } else {
            let m = self.lo.abs().max(self.hi);
            Interval { lo: 0.0, hi: up(m * m, 1) }
        }
    }

    pub fn sqrt(self) -> Interval {
        Interval { lo: down(self.lo.max(0.0).sqrt(), 1), hi: up(self.hi.sqrt(), 1) }.clamp_lo(0.0)
    }

    pub fn recip(self) -> Interval {
        assert!(self.lo > 0.0 || self.hi < 0.0, "division by an interval containing zero");
        Interval { lo: down(1.0 / self.hi, 1), hi: up(1.0 / self.lo, 1) }
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval { lo: 0.0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn max(self, o: Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn clamp_lo(self, v: f64) -> Interval {
        Interval { lo: self.lo.max(v), hi: self.hi.max(v) }
    }

    pub fn clamp_hi(self, v: f64) -> Interval {
        Interval { lo: self.lo.min(v), hi: self.hi.min(v) }
    }

    pub fn scale(self, c: f64) -> Interval {
        self * Interval::point(c)
    }

    /// `x^p` for `x > 0` via `exp(p ln x)`.
    pub fn powf(self, p: Interval) -> Interval {
        (self.ln() * p).exp()
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo + o.lo, 1), hi: up(self.hi + o.hi, 1) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo - o.hi, 1), hi: up(self.hi - o.lo, 1) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        // 0 * inf shows up only for degenerate inputs; treat it as 0
        let c = c.map(|v| if v.is_nan() { 0.0 } else { v });
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: down(lo, 1), hi: up(hi, 1) }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        self * o.recip()
    }
}

/// A nonnegative sum `e^shift * acc`, kept in scaled form to avoid overflow.
#[derive(Clone, Copy, Debug)]
pub struct LogAcc {
    shift: f64,
    acc: Interval,
}

impl Default for LogAcc {
    fn default() -> Self {
        LogAcc::zero()
    }
}

impl LogAcc {
    pub fn zero() -> Self {
        LogAcc { shift: 0.0, acc: Interval::ZERO }
    }

    pub fn is_zero(&self) -> bool {
        self.acc.hi == 0.0
    }

    /// Adds `e^x`.
    pub fn add_log(&mut self, x: Interval) {
        if x.hi == f64::NEG_INFINITY {
            return;
        }
        self.rescale_for(x.hi);
        self.acc = self.acc + (x - Interval::point(self.shift)).exp();
    }

    /// Adds a nonnegative interval `[0, e^x]` of unknown exact value.
    pub fn add_upper_log(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        self.rescale_for(x);
        let e = (Interval::point(x) - Interval::point(self.shift)).exp();
        self.acc = self.acc + Interval::new(0.0, e.hi);
    }

    pub fn add_acc(&mut self, o: &LogAcc) {
        if o.acc.hi == 0.0 {
            return;
        }
        let target = if self.acc.hi == 0.0 { o.shift } else { self.shift.max(o.shift) };
        if self.acc.hi == 0.0 {
            self.shift = target;
        } else if target > self.shift {
            self.acc = self.acc * (Interval::point(self.shift) - Interval::point(target)).exp();
            self.shift = target;
        }
        let f = (Interval::point(o.shift) - Interval::point(self.shift)).exp();
        self.acc = self.acc + o.acc * f;
    }

    fn rescale_for(&mut self, xhi: f64) {
        if self.acc.hi == 0.0 {
            self.shift = xhi;
            return;
        }
        if xhi > self.shift + 300.0 {
            let f = (Interval::point(self.shift) - Interval::point(xhi)).exp();
            self.acc = self.acc * f;
            self.shift = xhi;
        }
    }

    /// Enclosure of the natural log of the sum; `lo = -inf` if the sum may be 0.
    pub fn ln(&self) -> Interval {
        if self.acc.hi == 0.0 {
            return Interval::point(f64::NEG_INFINITY);
        }
        self.acc.ln() + Interval::point(self.shift)
    }

    /// Enclosure of the sum itself (may overflow to infinity).
    pub fn value(&self) -> Interval {
        self.acc * Interval::point(self.shift).exp()
    }

    pub fn lo_ln(&self) -> f64 {
        self.ln().lo
    }
}

/// `ln(e^a + e^b)` style combination of log-intervals.
pub fn log_add(a: Interval, b: Interval) -> Interval {
    let mut acc = LogAcc::zero();
    acc.add_log(a);
    acc.add_log(b);
    acc.ln()
}

/// Certified `ln(1 - e^x)` for `x < 0`.
pub fn ln_one_minus_exp(x: Interval) -> Interval {
    assert!(x.hi < 0.0);
    // 1 - e^x is decreasing in x
    let f = |v: f64, r: u32| -> f64 {
        let y = if v > -0.693 { (-(v.exp_m1())).ln() } else { (-(v.exp())).ln_1p() };
        if r == 0 {
            down(y, LIBM_ULPS + 2)
        } else {
            up(y, LIBM_ULPS + 2)
        }
    };
    Interval { lo: f(x.hi, 0), hi: f(x.lo, 1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::rat;

    #[test]
    fn encloses_basic_values() {
        let third = Interval::from_rat(&rat(1, 3));
        assert!(third.contains(1.0 / 3.0));
        let two = Interval::point(2.0);
        let l = two.ln();
        assert!(l.contains(std::f64::consts::LN_2));
        assert!(l.width() < 1e-14);
        let e = Interval::ONE.exp();
        assert!(e.contains(std::f64::consts::E));
    }

    #[test]
    fn logacc_handles_huge_exponents() {
        let mut a = LogAcc::zero();
        a.add_log(Interval::point(1000.0));
        a.add_log(Interval::point(1000.0));
        let l = a.ln();
        assert!(l.contains(1000.0 + std::f64::consts::LN_2));
        let mut b = LogAcc::zero();
        b.add_log(Interval::point(-5.0));
        b.add_log(Interval::point(2000.0));
        assert!(b.ln().contains(2000.0));
    }

    #[test]
    fn one_minus_exp() {
        let v = ln_one_minus_exp(Interval::point(-1e-8));
        assert!(v.contains((1e-8f64).ln() - 0.5e-8));
        let w = ln_one_minus_exp(Interval::point(-3.0));
        assert!(w.contains((1.0 - (-3.0f64).exp()).ln()));
    }
}
