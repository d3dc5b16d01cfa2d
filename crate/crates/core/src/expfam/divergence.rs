//! Information divergence and total variation between family members.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exactgeom::rat::{Rat, RatVec};
use num_traits::{Signed, Zero};
use crate::interval::Interval;
use crate::measure::{AtomFamily, MixedMeasure};

use super::eval::{family_decay, family_seq, log_sum, moment, Moment, Select, Tilt};
use super::member::{condition, FamilyMember};

/// Cap on the explicit crossover range when comparing two family tails.
const CROSSOVER_SCAN: f64 = 1e6;

/// A value in `[0, +inf]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extended {
    Finite(Interval),
    PosInf,
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<Interval> {
        match self {
            Extended::Finite(v) => Some(*v),
            Extended::PosInf => None,
        }
    }
}

/// `ln Q(cl F)` for a face inside the member's face.
pub fn ln_face_mass(q: &FamilyMember, face_flat: &crate::exactgeom::flat::AffineFlat, eps: f64) -> Result<Interval> {
    let on = log_sum(q.measure(), &q.theta, Select::On(face_flat), eps / 4.0)?.ok_or(Error::EmptyRestriction)?;
    let Some(off) = log_sum(q.measure(), &q.theta, Select::Off(face_flat), eps / 4.0)? else {
        return Ok(Interval::ZERO);
    };
    // -ln(1 + Z_off/Z_on) keeps tiny defects that ln Z_on - ln Z would cancel away
    Ok((-(off - on).exp().ln_1p()).clamp_hi(0.0))
}

/// `D(P || Q)`.
pub fn divergence(p: &FamilyMember, q: &FamilyMember, eps: f64) -> Result<Extended> {
    if !p.face.is_subface_of(&q.face) {
        return Ok(Extended::PosInf);
    }
    if p.face.flat.contains_flat(&q.face.flat) {
        return divergence_same_face(p, q, eps);
    }
    // D(P||Q) = D(P||Q(.|cl F)) - ln Q(cl F)
    let inner = divergence_same_face(p, &condition(q, &p.face)?, eps / 2.0)?;
    let ln_mass = ln_face_mass(q, &p.face.flat, eps / 4.0)?;
    Ok(match inner {
        Extended::PosInf => Extended::PosInf,
        Extended::Finite(v) => Extended::Finite((v - ln_mass).clamp_lo(0.0)),
    })
}

/// `E_P <theta - theta', x> - Lambda(theta) + Lambda(theta')` on one face.
fn divergence_same_face(p: &FamilyMember, q: &FamilyMember, eps: f64) -> Result<Extended> {
    let mu = p.measure();
    let delta = p.theta.sub(&q.theta);
    if delta.is_zero() {
        return Ok(Extended::Finite(Interval::ZERO));
    }
    let lp = p.log_partition(eps / 8.0)?;
    let lq = q.log_partition(eps / 8.0)?;
    let mean = match &delta.exact {
        Some(tau) => moment(mu, &p.theta, lp, tau, Select::All, eps / 4.0)?,
        None => coordinate_mean(mu, &p.theta, lp, &delta, eps / 4.0)?,
    };
    match mean {
        Moment::PosInf => Ok(Extended::PosInf),
        Moment::NegInf => Err(Error::InvalidInput("divergence with a divergent negative part".into())),
        Moment::Finite(m) => Ok(Extended::Finite((m - lp + lq).clamp_lo(0.0))),
    }
}

/// `sum_i delta_i E[x_i]` for a non-rational `delta`.
fn coordinate_mean(mu: &MixedMeasure, theta: &Tilt, lz: Interval, delta: &Tilt, eps: f64) -> Result<Moment> {
    let d = mu.dim;
    let mut total = Interval::ZERO;
    for i in 0..d {
        let c = delta.coords[i];
        if c.lo == 0.0 && c.hi == 0.0 {
            continue;
        }
        let scale = c.abs().hi.max(1.0) * d as f64;
        match moment(mu, theta, lz, &RatVec::unit(d, i), Select::All, eps / scale)? {
            Moment::Finite(m) => total = total + c * m,
            _ => return Err(Error::PrecisionUnreachable("divergence with irrational parameters on a heavy tail".into())),
        }
    }
    Ok(Moment::Finite(total))
}

/// `sum_x |P(x) - Q(x)|`, in `[0, 2]`.
pub fn variation_distance(p: &FamilyMember, q: &FamilyMember, eps: f64) -> Result<Interval> {
    if p.measure().dim != q.measure().dim {
        return Err(Error::DimensionMismatch { expected: p.measure().dim, got: q.measure().dim });
    }
    if let (Some(a), Some(b)) = (untilted_pmf(p), untilted_pmf(q)) {
        let mut total = Rat::zero();
        for (x, pa) in &a {
            let qa = b.iter().find(|(y, _)| y == x).map_or_else(Rat::zero, |(_, w)| w.clone());
            total += (pa - qa).abs();
        }
        total += b.iter().filter(|(y, _)| !a.iter().any(|(x, _)| x == y)).map(|(_, w)| w.clone()).sum::<Rat>();
        return Ok(Interval::from_rat(&total));
    }
    let common = match p.measure().restrict(&q.face.flat) {
        Ok(m) => m,
        Err(Error::EmptyRestriction) => return Ok(Interval::point(2.0)),
        Err(e) => return Err(e),
    };
    let lp = p.log_partition(eps / 16.0)?;
    let lq = q.log_partition(eps / 16.0)?;
    let nparts = (common.atoms.len() + common.families.len()).max(1) as f64;
    let tol = eps / (8.0 * nparts);
    let mut overlap = Interval::ZERO;
    for a in &common.atoms {
        let lw = a.weight.ln();
        let pa = (lw + p.theta.dot(&a.point) - lp).exp();
        let qa = (lw + q.theta.dot(&a.point) - lq).exp();
        overlap = overlap + imin(pa, qa);
    }
    for f in &common.families {
        overlap = overlap + family_overlap(f, &p.theta, lp, &q.theta, lq, tol)?;
    }
    Ok((Interval::point(2.0) - overlap.scale(2.0)).clamp_lo(0.0).clamp_hi(2.0))
}

/// Rational probabilities of a finite member whose tilt is constant on its
/// atoms.
fn untilted_pmf(m: &FamilyMember) -> Option<Vec<(RatVec, Rat)>> {
    let mu = m.measure();
    if !mu.families.is_empty() {
        return None;
    }
    let t = m.exact_theta()?;
    let level = t.dot(&mu.atoms.first()?.point);
    let mut ws = Vec::with_capacity(mu.atoms.len());
    for a in &mu.atoms {
        if t.dot(&a.point) != level {
            return None;
        }
        ws.push((a.point.clone(), a.weight.as_rational()?));
    }
    let total: Rat = ws.iter().map(|(_, w)| w.clone()).sum();
    Some(ws.into_iter().map(|(x, w)| (x, w / &total)).collect())
}

fn imin(a: Interval, b: Interval) -> Interval {
    Interval::new(a.lo.min(b.lo), a.hi.min(b.hi))
}

/// `sum_k min(p_k, q_k)` over one family shared by both members.
fn family_overlap(f: &AtomFamily, tp: &Tilt, lp: Interval, tq: &Tilt, lq: Interval, tol: f64) -> Result<Interval> {
    let dp = family_decay(f, tp)?.ok_or(Error::DomainViolation)?;
    let dq = family_decay(f, tq)?.ok_or(Error::DomainViolation)?;
    let sp = family_seq(f, tp, dp, 0, -lp);
    let sq = family_seq(f, tq, dq, 0, -lq);
    let ln_tol = tol.ln();
    let delta = tp.sub(tq);
    // ln p_k - ln q_k = c0 + c1 k + c2 k^2
    let c0 = delta.dot(&f.base) - lp + lq;
    let c1 = delta.dot(&f.lin);
    let c2 = delta.dot(&f.quad);
    let lead = match delta.sign_dot(&f.quad)? {
        Ordering::Equal => delta.sign_dot(&f.lin)?,
        o => o,
    };
    if lead == Ordering::Equal {
        let a = sp.sum(&[], ln_tol)?.value();
        let b = sq.sum(&[], ln_tol)?.value();
        return Ok(imin(a, b));
    }
    let bound = if f.quad.is_zero() || delta.sign_dot(&f.quad)? == Ordering::Equal {
        1.0 + c0.abs().hi / c1.abs().lo
    } else {
        1.0 + c0.abs().hi.max(c1.abs().hi) / c2.abs().lo
    };
    if !(bound <= CROSSOVER_SCAN) {
        return Err(Error::PrecisionUnreachable("crossover of two family tails too far out".into()));
    }
    let r = bound.ceil() as u64;
    let mut head = Interval::ZERO;
    for k in 1..=r {
        head = head + imin(sp.log_term(k).exp(), sq.log_term(k).exp());
    }
    // beyond r the sign of ln p_k - ln q_k is the sign of the leading coefficient
    let smaller = if lead == Ordering::Greater { &sq } else { &sp };
    let tail = smaller.sum_from(r + 1, &[], ln_tol)?.value();
    Ok(head + tail)
}
