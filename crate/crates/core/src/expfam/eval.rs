//! Certified sums `sum_x w(x) e^{<theta, x>}` over selected atoms of a measure,
//! and their first moments.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::flat::AffineFlat;
use crate::exactgeom::rat::{Rat, RatVec};
use crate::interval::{Interval, LogAcc};
use crate::measure::{AtomFamily, MixedMeasure, OnFlat, Weight};
use crate::series::{Decay, TermSeq};

/// Cap on the explicit index range of a halfspace cut through a family.
const HALFSPACE_SCAN: u64 = 1_000_000;

/// A parameter: exact rational, or given through positive ratios `e^{theta_i}`.
#[derive(Clone, Debug)]
pub struct Tilt {
    pub exact: Option<RatVec>,
    /// `e^{theta_i}` when the parameter came in as ratios.
    pub ratios: Option<Vec<Rat>>,
    pub coords: Vec<Interval>,
}

/// Exponents beyond this fall back to interval comparisons.
const RATIO_POWER_CAP: u64 = 4096;

impl Tilt {
    pub fn exact(v: &RatVec) -> Self {
        Tilt { exact: Some(v.clone()), ratios: None, coords: v.iter().map(Interval::from_rat).collect() }
    }

    /// `theta_i = ln(r_i)` for positive rationals `r_i`.
    pub fn from_ratios(r: &[Rat]) -> Result<Self> {
        if r.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidInput("tilt ratios must be positive".into()));
        }
        if r.iter().all(One::is_one) {
            return Ok(Tilt::exact(&RatVec::zeros(r.len())));
        }
        Ok(Tilt { exact: None, ratios: Some(r.to_vec()), coords: r.iter().map(|x| Interval::from_rat(x).ln()).collect() })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, x: &RatVec) -> Interval {
        if let Some(e) = &self.exact {
            return Interval::from_rat(&e.dot(x));
        }
        self.coords
            .iter()
            .zip(x.iter())
            .filter(|(_, xi)| !xi.is_zero())
            .fold(Interval::ZERO, |acc, (c, xi)| acc + *c * Interval::from_rat(xi))
    }

    /// Sign of `<theta, x>`, exact when possible.
    pub fn sign_dot(&self, x: &RatVec) -> Result<Ordering> {
        self.sign_dot_plus_ln(x, &Rat::one())
    }

    /// Sign of `<theta, x> + ln(c)` for `c > 0`.
    pub fn sign_dot_plus_ln(&self, x: &RatVec, c: &Rat) -> Result<Ordering> {
        if let Some(e) = &self.exact {
            let d = e.dot(x);
            if c.is_one() {
                return Ok(d.cmp(&Rat::zero()));
            }
            // e^q is irrational for rational q != 0, so e^q = 1/c forces q = 0
            if d.is_zero() {
                return Ok(c.cmp(&Rat::one()));
            }
            if (d.is_positive()) == (c > &Rat::one()) {
                return Ok(d.cmp(&Rat::zero()));
            }
        }
        if let Some(r) = &self.ratios {
            if let Some(o) = ratio_log_sign(r, x, c) {
                return Ok(o);
            }
        }
        interval_sign(self.dot(x) + Interval::from_rat(c).ln())
    }

    /// Orthogonal projection onto `lin(flat)`.
    pub fn project(&self, flat: &AffineFlat) -> Tilt {
        if let Some(e) = &self.exact {
            return Tilt::exact(&flat.project(e));
        }
        let d = self.dim();
        if flat.dim() == d {
            return self.clone();
        }
        let cols: Vec<RatVec> = (0..d).map(|j| flat.project(&RatVec::unit(d, j))).collect();
        let coords = (0..d)
            .map(|i| {
                (0..d)
                    .filter(|&j| !cols[j][i].is_zero())
                    .fold(Interval::ZERO, |acc, j| acc + Interval::from_rat(&cols[j][i]) * self.coords[j])
            })
            .collect();
        Tilt { exact: None, ratios: None, coords }
    }

    pub fn sub(&self, o: &Tilt) -> Tilt {
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            return Tilt::exact(&a.sub(b));
        }
        let ratios = match (&self.ratios, &o.ratios, &self.exact, &o.exact) {
            (Some(a), Some(b), _, _) => Some(a.iter().zip(b).map(|(x, y)| x / y).collect()),
            (Some(a), None, _, Some(z)) if z.is_zero() => Some(a.clone()),
            (None, Some(b), Some(z), _) if z.is_zero() => Some(b.iter().map(|y| y.recip()).collect()),
            _ => None,
        };
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| *a - *b).collect();
        Tilt { exact: None, ratios, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(RatVec::is_zero) || self.ratios.as_ref().is_some_and(|r| r.iter().all(One::is_one))
    }

    /// The same parameter as a line of text: rationals, or `e^{...}` ratios.
    pub fn describe(&self) -> Vec<String> {
        match (&self.exact, &self.ratios) {
            (Some(e), _) => e.to_strings(),
            (None, Some(r)) => r.iter().map(|x| format!("ln({})", crate::exactgeom::rat::fmt_rat(x))).collect(),
            _ => self.coords.iter().map(|c| format!("{:.17e}", c.mid())).collect(),
        }
    }
}

/// Sign of `ln(c * prod r_i^{x_i})`, decided by exact powers.
fn ratio_log_sign(r: &[Rat], x: &RatVec, c: &Rat) -> Option<Ordering> {
    use num_integer::Integer;
    let den = x.iter().fold(BigInt::one(), |l, xi| l.lcm(xi.denom()));
    let den = den.to_u64()?;
    let mut val = pow_int(c, &BigInt::from(den))?;
    for (ri, xi) in r.iter().zip(x.iter()) {
        let e = (xi * Rat::from_integer(BigInt::from(den))).to_integer();
        val *= pow_int(ri, &e)?;
    }
    Some(val.cmp(&Rat::one()))
}

fn pow_int(b: &Rat, e: &BigInt) -> Option<Rat> {
    let m = e.abs().to_u64()?;
    if m > RATIO_POWER_CAP {
        return None;
    }
    let p = num_traits::pow(b.clone(), m as usize);
    Some(if e.is_negative() { p.recip() } else { p })
}

fn interval_sign(v: Interval) -> Result<Ordering> {
    if v.lo > 0.0 {
        Ok(Ordering::Greater)
    } else if v.hi < 0.0 {
        Ok(Ordering::Less)
    } else {
        Err(Error::PrecisionUnreachable("cannot certify the sign of a boundary comparison".into()))
    }
}

/// Sign of `<theta, u> + ln rho`.
pub fn rate_sign(f: &AtomFamily, tilt: &Tilt) -> Result<Ordering> {
    tilt.sign_dot_plus_ln(&f.lin, &f.rho)
}

/// Decay class of the family's terms under the tilt; `None` if the sum diverges.
pub fn family_decay(f: &AtomFamily, tilt: &Tilt) -> Result<Option<Decay>> {
    if f.is_curve() {
        match tilt.sign_dot(&f.quad)? {
            Ordering::Less => return Ok(Some(Decay::Quadratic)),
            Ordering::Greater => return Ok(None),
            Ordering::Equal => {}
        }
    }
    Ok(match rate_sign(f, tilt)? {
        Ordering::Less => Some(Decay::Geometric),
        Ordering::Greater => None,
        Ordering::Equal => (f.alpha > Rat::one()).then_some(Decay::Power),
    })
}

/// Terms `k^j w_k e^{<theta, x_k>} e^{shift}`.
pub fn family_seq(f: &AtomFamily, tilt: &Tilt, decay: Decay, j: u32, shift: Interval) -> TermSeq {
    TermSeq {
        l: Interval::from_rat(&f.scale).ln() + tilt.dot(&f.base) + shift,
        t: tilt.dot(&f.lin) + Interval::from_rat(&f.rho).ln(),
        a: if decay == Decay::Quadratic { tilt.dot(&f.quad) } else { Interval::ZERO },
        m: Rat::from_integer(BigInt::from(j)) - &f.alpha,
        decay,
    }
}

/// Which atoms of the measure enter a sum.
#[derive(Clone, Copy, Debug)]
pub enum Select<'a> {
    All,
    On(&'a AffineFlat),
    Off(&'a AffineFlat),
    /// `<normal, x> >= offset`.
    HalfGe(&'a RatVec, &'a Rat),
}

#[derive(Clone, Debug)]
pub enum KSet {
    AllBut(Vec<u64>),
    Only(Vec<u64>),
}

pub enum Part<'a> {
    Atom(RatVec, Weight),
    Family(&'a AtomFamily, KSet),
}

pub fn parts<'a>(mu: &'a MixedMeasure, sel: Select<'_>) -> Result<Vec<Part<'a>>> {
    let mut out = Vec::new();
    let keep_atom = |x: &RatVec| match sel {
        Select::All => true,
        Select::On(fl) => fl.contains(x),
        Select::Off(fl) => !fl.contains(x),
        Select::HalfGe(n, b) => &n.dot(x) >= b,
    };
    for a in &mu.atoms {
        if keep_atom(&a.point) {
            out.push(Part::Atom(a.point.clone(), a.weight.clone()));
        }
    }
    for f in &mu.families {
        let ks = match sel {
            Select::All => Some(KSet::AllBut(vec![])),
            Select::On(fl) => match f.indices_on(fl) {
                OnFlat::All => Some(KSet::AllBut(vec![])),
                OnFlat::Some(ks) => Some(KSet::Only(ks)),
            },
            Select::Off(fl) => match f.indices_on(fl) {
                OnFlat::All => None,
                OnFlat::Some(ks) => Some(KSet::AllBut(ks)),
            },
            Select::HalfGe(n, b) => Some(halfspace_kset(f, n, b)?),
        };
        match ks {
            Some(KSet::Only(ks)) if ks.is_empty() => {}
            Some(ks) => out.push(Part::Family(f, ks)),
            None => {}
        }
    }
    Ok(out)
}

fn halfspace_kset(f: &AtomFamily, n: &RatVec, b: &Rat) -> Result<KSet> {
    let c = [n.dot(&f.base) - b, n.dot(&f.lin), n.dot(&f.quad)];
    let lead = (0..3).rev().find(|&i| !c[i].is_zero());
    let Some(li) = lead else {
        return Ok(KSet::AllBut(vec![]));
    };
    let eventually_in = c[li].is_positive();
    // Cauchy bound on the real roots
    let bound = (0..li)
        .map(|i| (&c[i] / &c[li]).abs())
        .fold(Rat::zero(), |m, v| if v > m { v } else { m })
        + Rat::one();
    let r = bound.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
    if r > HALFSPACE_SCAN {
        return Err(Error::PrecisionUnreachable("halfspace cut too far along a family".into()));
    }
    let val = |k: u64| {
        let kr = Rat::from_integer(BigInt::from(k));
        &c[0] + &c[1] * &kr + &c[2] * &kr * &kr
    };
    let ks: Vec<u64> = (1..=r)
        .filter(|&k| if eventually_in { val(k).is_negative() } else { !val(k).is_negative() })
        .collect();
    Ok(if eventually_in { KSet::AllBut(ks) } else { KSet::Only(ks) })
}

fn atom_log(w: &Weight, x: &RatVec, tilt: &Tilt) -> Interval {
    w.ln() + tilt.dot(x)
}

/// `ln sum w(x) e^{<theta,x>}` over the selection with relative precision
/// `rel_eps` on the sum; `None` when no atom is selected.
pub fn log_sum(mu: &MixedMeasure, tilt: &Tilt, sel: Select<'_>, rel_eps: f64) -> Result<Option<Interval>> {
    let parts = parts(mu, sel)?;
    let mut exact = LogAcc::zero();
    let mut series: Vec<(TermSeq, Vec<u64>)> = Vec::new();
    let mut estimate = LogAcc::zero();
    for p in &parts {
        match p {
            Part::Atom(x, w) => exact.add_log(atom_log(w, x, tilt)),
            Part::Family(f, KSet::Only(ks)) => {
                for &k in ks {
                    exact.add_log(atom_log(&f.weight(k), &f.atom(k), tilt));
                }
            }
            Part::Family(f, KSet::AllBut(skip)) => {
                let decay = family_decay(f, tilt)?.ok_or(Error::DomainViolation)?;
                let s = family_seq(f, tilt, decay, 0, Interval::ZERO);
                let first = (1..).find(|k| !skip.contains(k)).expect("finite skip");
                estimate.add_log(s.log_term(first));
                series.push((s, skip.clone()));
            }
        }
    }
    if parts.is_empty() {
        return Ok(None);
    }
    estimate.add_acc(&exact);
    let ln_tol = estimate.ln().lo + rel_eps.ln() - ((2 * series.len().max(1)) as f64).ln();
    let mut total = exact;
    for (s, skip) in &series {
        total.add_acc(&s.sum(skip, ln_tol)?);
    }
    Ok(Some(total.ln()))
}

/// A first moment that may diverge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Moment {
    Finite(Interval),
    PosInf,
    NegInf,
}

/// `sum <tau, x> w(x) e^{<theta,x> - ln_z}` over the selection, to absolute
/// precision `eps`.
pub fn moment(
    mu: &MixedMeasure,
    tilt: &Tilt,
    ln_z: Interval,
    tau: &RatVec,
    sel: Select<'_>,
    eps: f64,
) -> Result<Moment> {
    let parts = parts(mu, sel)?;
    let shift = -ln_z;
    let mut total = Interval::ZERO;
    let mut pos_inf = false;
    let mut neg_inf = false;
    let mut pending: Vec<(TermSeq, Vec<u64>, Interval)> = Vec::new();
    for p in &parts {
        match p {
            Part::Atom(x, w) => {
                let c = tau.dot(x);
                if !c.is_zero() {
                    total = total + Interval::from_rat(&c) * (atom_log(w, x, tilt) + shift).exp();
                }
            }
            Part::Family(f, KSet::Only(ks)) => {
                for &k in ks {
                    let x = f.atom(k);
                    let c = tau.dot(&x);
                    if !c.is_zero() {
                        total = total + Interval::from_rat(&c) * (atom_log(&f.weight(k), &x, tilt) + shift).exp();
                    }
                }
            }
            Part::Family(f, KSet::AllBut(skip)) => {
                let decay = family_decay(f, tilt)?.ok_or(Error::DomainViolation)?;
                let coefs = [tau.dot(&f.base), tau.dot(&f.lin), tau.dot(&f.quad)];
                for (j, c) in coefs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let s = family_seq(f, tilt, decay, j as u32, shift);
                    if decay == Decay::Power && s.m >= -Rat::one() {
                        if c.is_positive() {
                            pos_inf = true;
                        } else {
                            neg_inf = true;
                        }
                        continue;
                    }
                    pending.push((s, skip.clone(), Interval::from_rat(c)));
                }
            }
        }
    }
    match (pos_inf, neg_inf) {
        (true, true) => return Err(Error::InvalidInput("moment is undefined (both parts diverge)".into())),
        (true, false) => return Ok(Moment::PosInf),
        (false, true) => return Ok(Moment::NegInf),
        _ => {}
    }
    let n = pending.len().max(1) as f64;
    for (s, skip, c) in pending {
        let cmax = c.abs().hi;
        let ln_tol = (eps / (2.0 * n * cmax)).ln();
        let v = s.sum(&skip, ln_tol)?.value();
        total = total + c * v;
    }
    Ok(Moment::Finite(total))
}
