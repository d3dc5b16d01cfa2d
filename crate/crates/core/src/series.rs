//! Certified summation of `sum_{k >= 1} exp(l + t k + a k^2) k^m`.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::rat::{rat_to_f64, Rat};
use crate::interval::{ln_one_minus_exp, Interval, LogAcc};

/// Hard cap on explicitly summed terms per series.
pub const TERM_CAP: u64 = 4_000_000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// How the terms decay; decided exactly by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decay {
    /// `a < 0`.
    Quadratic,
    /// `a = 0`, `t < 0`.
    Geometric,
    /// `a = 0`, `t = 0`, `m < -1`.
    Power,
}

#[derive(Clone, Debug)]
pub struct TermSeq {
    pub l: Interval,
    pub t: Interval,
    pub a: Interval,
    pub m: Rat,
    pub decay: Decay,
}

impl TermSeq {
    pub fn log_term(&self, k: u64) -> Interval {
        let kf = Interval::point(k as f64);
        let mut v = self.l + self.t * kf;
        if self.decay == Decay::Quadratic {
            v = v + self.a * kf.sqr();
        }
        if !self.m.is_zero() && k > 1 {
            v = v + Interval::from_rat(&self.m) * kf.ln();
        }
        v
    }

    fn m_f64(&self) -> f64 {
        rat_to_f64(&self.m)
    }

    /// Upper bound on `ln` of the full sum, without summing.
    pub fn crude_upper_ln(&self) -> f64 {
        let m = self.m_f64();
        let one = Interval::ONE;
        match self.decay {
            Decay::Power => {
                let n = Interval::from_rat(&-self.m.clone());
                (self.l + (one + (n - one).recip()).ln()).hi
            }
            Decay::Geometric => {
                if m <= 0.0 {
                    (self.l + self.t - ln_one_minus_exp(self.t)).hi
                } else {
                    let mi = Interval::point(m);
                    let half = self.t.scale(0.5);
                    let peak = mi * (mi.scale(2.0) / (self.t.abs() * Interval::ONE.exp())).ln();
                    (self.l + peak + half - ln_one_minus_exp(half)).hi
                }
            }
            Decay::Quadratic => {
                let (a, extra) = if m <= 0.0 {
                    (self.a, Interval::ZERO)
                } else {
                    let mi = Interval::point(m);
                    let a2 = self.a.scale(0.5);
                    (a2, mi.scale(0.5) * (mi / (self.a.abs() * Interval::ONE.exp())).ln())
                };
                let t = self.t;
                // peak of t x + a x^2 sits at t / (2|a|)
                if t.hi <= 2.0 * a.abs().lo {
                    let slope = t + a.scale(2.0);
                    if slope.hi < 0.0 {
                        let v = (t + a) + (one + slope.abs().recip()).ln();
                        return (self.l + extra + v).hi;
                    }
                }
                let mg = t.sqr() / a.abs().scale(4.0);
                let v = mg + (one + (Interval::point(std::f64::consts::PI) / a.abs()).sqrt()).ln();
                (self.l + extra + v).hi
            }
        }
    }

    /// Bounds on `ln sum_{k > kk}` if one is available at this cut.
    fn tail_ln(&self, kk: u64) -> Option<Interval> {
        let mut best: Option<Interval> = None;
        let mut consider = |iv: Interval| {
            if iv.lo <= iv.hi && !iv.hi.is_nan() {
                best = Some(match best {
                    Some(b) if b.hi - b.lo <= iv.hi - iv.lo => b,
                    _ => iv,
                });
            }
        };
        // ratio bound, valid once past the peak
        if self.a.hi <= 0.0 {
            let k1 = kk + 1;
            let mplus = self.m_f64().max(0.0);
            let mut g = self.t + self.a * Interval::point((2 * k1 + 1) as f64);
            if mplus > 0.0 {
                g = g + Interval::point(mplus) * Interval::point(1.0 / k1 as f64).ln_1p().scale(1.0 + 1e-15);
            }
            if g.hi < 0.0 {
                let first = self.log_term(k1);
                let hi = first.hi - ln_one_minus_exp(Interval::point(g.hi)).lo;
                consider(Interval::new(first.lo, up(hi)));
            }
        }
        // convex decreasing integral sandwich
        if self.decay != Decay::Quadratic && !self.m.is_positive() {
            let n = -self.m.clone();
            let k1 = (kk + 1) as f64;
            let lo_int = self.integral_ln(&n, k1);
            let hi_int = self.integral_ln(&n, kk as f64 + 0.5);
            if let (Some(lo_i), Some(hi_i)) = (lo_int, hi_int) {
                let f1 = self.log_term(kk + 1) + Interval::point(0.5).ln();
                let mut lo = LogAcc::zero();
                lo.add_log(Interval::point(lo_i.lo));
                lo.add_log(Interval::point(f1.lo));
                consider(Interval::new(lo.ln().lo, hi_i.hi));
            }
        }
        best
    }

    /// `ln int_x^inf e^{l + t s} s^{-n} ds`.
    fn integral_ln(&self, n: &Rat, x: f64) -> Option<Interval> {
        let xi = Interval::point(x);
        let nf = Interval::from_rat(n);
        match self.decay {
            Decay::Power => {
                let nm1 = nf - Interval::ONE;
                Some(self.l + (Interval::ONE - nf) * xi.ln() - nm1.ln())
            }
            Decay::Geometric => {
                if !n.is_integer() {
                    return None;
                }
                let ni = n.to_integer().to_u32()?;
                let z = -self.t * xi;
                let e = expint(ni, z)?;
                Some(self.l + (Interval::ONE - nf) * xi.ln() + e.ln())
            }
            Decay::Quadratic => None,
        }
    }

    /// Encloses the sum over `k >= 1`, `k` not in `skip`, to absolute width
    /// at most `e^ln_tol`.
    pub fn sum(&self, skip: &[u64], ln_tol: f64) -> Result<LogAcc> {
        self.sum_from(1, skip, ln_tol)
    }

    /// As [`TermSeq::sum`] over `k >= start`.
    pub fn sum_from(&self, start: u64, skip: &[u64], ln_tol: f64) -> Result<LogAcc> {
        let mut acc = LogAcc::zero();
        let crude = self.crude_upper_ln();
        if crude <= ln_tol {
            acc.add_upper_log(crude);
            return Ok(acc);
        }
        let last_skip = skip.iter().copied().max().unwrap_or(0);
        let mut k: u64 = start;
        loop {
            if !skip.contains(&k) {
                acc.add_log(self.log_term(k));
            }
            let check = k < start + 64 || k % 16 == 0;
            if k >= last_skip && check {
                if let Some(tail) = self.tail_ln(k) {
                    let width_ln = if tail.lo == f64::NEG_INFINITY || tail.lo >= tail.hi {
                        tail.hi
                    } else {
                        tail.hi + ln_one_minus_exp(Interval::point(tail.lo - tail.hi)).hi
                    };
                    let tol = ln_tol.max(acc.lo_ln() + (-40.0));
                    if width_ln <= tol {
                        acc.add_log(tail);
                        return Ok(acc);
                    }
                }
            }
            k += 1;
            if k > start + TERM_CAP {
                return Err(Error::PrecisionUnreachable(format!(
                    "series did not reach the requested precision within {TERM_CAP} terms"
                )));
            }
        }
    }
}

fn up(x: f64) -> f64 {
    x.next_up().next_up()
}

/// Generalized exponential integral `E_n(z)` for `z > 0`.
pub fn expint(n: u32, z: Interval) -> Option<Interval> {
    if z.lo <= 0.0 {
        return None;
    }
    if z.lo < z.hi {
        // decreasing in z: the endpoints bound it
        let a = expint(n, Interval::point(z.lo))?;
        let b = expint(n, Interval::point(z.hi))?;
        return Some(Interval::new(b.lo, a.hi));
    }
    if n == 0 {
        return Some((-z).exp() / z);
    }
    if z.hi <= 1.0 {
        let mut e = e1_series(z);
        for j in 1..n {
            e = ((-z).exp() - z * e) / Interval::point(j as f64);
        }
        return Some(e.clamp_lo(0.0));
    }
    Some(expint_cf(n, z))
}

fn e1_series(z: Interval) -> Interval {
    let gamma = Interval::new(EULER_GAMMA.next_down(), EULER_GAMMA.next_up());
    let mut sum = Interval::ZERO;
    let mut pow = Interval::ONE;
    let mut fact = Interval::ONE;
    let mut k = 1u32;
    loop {
        pow = pow * z;
        fact = fact * Interval::point(k as f64);
        let term = pow / (fact * Interval::point(k as f64));
        if k % 2 == 1 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
        if term.hi < 1e-18 * (sum.abs().lo.max(1e-300)) || k > 60 {
            // alternating with decreasing terms: the remainder is below the next term
            let next = pow * z / (fact * Interval::point(((k + 1) * (k + 1)) as f64));
            sum = sum + Interval::new(-next.hi, next.hi);
            break;
        }
        k += 1;
    }
    -gamma - z.ln() + sum
}

/// Continued fraction with an enclosing tail `[z, inf)`.
fn expint_cf(n: u32, z: Interval) -> Interval {
    let mut depth = 16u32;
    loop {
        let mut x = Interval::new(z.lo, f64::INFINITY);
        for i in (1..=depth).rev() {
            let b = Interval::point(i as f64);
            let a = Interval::point((n + i - 1) as f64);
            let y = Interval::ONE + b * x.recip();
            x = z + a * y.recip();
        }
        let v = (-z).exp() * x.recip();
        if v.width() <= 1e-14 * v.lo || depth > 4096 {
            return v;
        }
        depth *= 2;
    }
}
