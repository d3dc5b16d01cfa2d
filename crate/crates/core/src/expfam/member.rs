//! Members `Q_{F,theta}` of the extended family and their basic functionals.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exactgeom::flat::AffineFlat;
use crate::exactgeom::linalg;
use crate::exactgeom::rat::{Rat, RatVec};
use crate::faces::FaceHandle;
use crate::interval::Interval;
use crate::measure::MixedMeasure;
use crate::series::Decay;

use super::domain::domain;
use super::eval::{family_decay, log_sum, moment, Moment, Select, Tilt};

pub const DEFAULT_EPS: f64 = 1e-9;

/// `Lambda(theta)` to absolute width `eps`.
pub fn log_partition(mu: &MixedMeasure, theta: &Tilt, eps: f64) -> Result<Interval> {
    if !domain(mu).contains(theta)? {
        return Err(Error::DomainViolation);
    }
    let mut rel = eps / 4.0;
    for _ in 0..6 {
        let v = log_sum(mu, theta, Select::All, rel)?.ok_or(Error::EmptyInput)?;
        if v.width() <= eps {
            return Ok(v);
        }
        rel /= 16.0;
    }
    Err(Error::PrecisionUnreachable(format!("log-partition to within {eps:e}")))
}

/// `Q_{F,theta}` with `theta` kept in `lin(F)`.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub face: FaceHandle,
    pub theta: Tilt,
}

impl FamilyMember {
    /// Projects `theta` onto `lin(F)` (the family does not see the rest) and
    /// checks it lies in the domain of the face's log-partition function.
    pub fn new(face: FaceHandle, theta: Tilt) -> Result<FamilyMember> {
        if theta.dim() != face.restricted.dim {
            return Err(Error::DimensionMismatch { expected: face.restricted.dim, got: theta.dim() });
        }
        let theta = theta.project(&face.lin());
        if !domain(&face.restricted).contains(&theta)? {
            return Err(Error::DomainViolation);
        }
        Ok(FamilyMember { face, theta })
    }

    pub fn top(mu: &MixedMeasure, theta: &RatVec) -> Result<FamilyMember> {
        FamilyMember::new(FaceHandle::top(mu), Tilt::exact(theta))
    }

    pub fn measure(&self) -> &MixedMeasure {
        &self.face.restricted
    }

    pub fn log_partition(&self, eps: f64) -> Result<Interval> {
        log_partition(self.measure(), &self.theta, eps)
    }

    pub fn exact_theta(&self) -> Option<&RatVec> {
        self.theta.exact.as_ref()
    }
}

/// `weight(x) e^{<theta,x> - Lambda_F(theta)}`; exactly zero off the atoms.
pub fn pmf(member: &FamilyMember, x: &RatVec, eps: f64) -> Result<Interval> {
    let Some(w) = member.measure().weight_at(x) else {
        return Ok(Interval::ZERO);
    };
    let mut e = eps / 4.0;
    for _ in 0..6 {
        let lz = member.log_partition(e)?;
        let v = (w.ln() + member.theta.dot(x) - lz).exp().clamp_lo(0.0);
        if v.width() <= eps {
            return Ok(v);
        }
        e /= 16.0;
    }
    Err(Error::PrecisionUnreachable(format!("pmf to within {eps:e}")))
}

/// `Q(. | cl F)`: the member of the face's family at the projected parameter.
pub fn condition(member: &FamilyMember, face: &FaceHandle) -> Result<FamilyMember> {
    if !face.is_subface_of(&member.face) {
        return Err(Error::InvalidInput("conditioning face is not inside the member's face".into()));
    }
    FamilyMember::new(face.clone(), member.theta.clone())
}

/// `M(P)` and the partial mean `m(P)`.
#[derive(Clone, Debug)]
pub struct IntegrabilityProfile {
    /// Basis of the linear space of integrable functionals.
    pub space: Vec<RatVec>,
    /// Normals cut out by the non-integrable directions.
    pub constraints: Vec<RatVec>,
    pub partial_mean: Vec<Interval>,
}

impl IntegrabilityProfile {
    pub fn space_flat(&self, d: usize) -> AffineFlat {
        AffineFlat::new(RatVec::zeros(d), &self.space)
    }

    pub fn contains(&self, tau: &RatVec) -> bool {
        self.constraints.iter().all(|c| c.dot(tau) == Rat::from_integer(0.into()))
    }
}

/// Directions `tau` must avoid: a family with sub-geometric decay and power
/// `alpha` integrates `k^j` only while `j - alpha < -1`.
pub fn integrability_constraints(member: &FamilyMember) -> Result<Vec<RatVec>> {
    let two = Rat::from_integer(2.into());
    let three = Rat::from_integer(3.into());
    let mut out = Vec::new();
    for f in &member.measure().families {
        if family_decay(f, &member.theta)? != Some(Decay::Power) {
            continue;
        }
        if f.is_curve() {
            if f.alpha <= three {
                out.push(f.quad.clone());
            }
            if f.alpha <= two {
                out.push(f.lin.clone());
            }
        } else if f.alpha <= two {
            out.push(f.lin.clone());
        }
    }
    Ok(out)
}

pub fn integrability(member: &FamilyMember, eps: f64) -> Result<IntegrabilityProfile> {
    let d = member.measure().dim;
    let constraints = integrability_constraints(member)?;
    let space = linalg::orth_complement(&constraints, d);
    let lz = member.log_partition(eps / 16.0)?;
    let mut values = Vec::new();
    for tau in &space {
        match moment(member.measure(), &member.theta, lz, tau, Select::All, eps / 4.0)? {
            Moment::Finite(v) => values.push(v),
            _ => return Err(Error::InvalidInput("integrable direction has an infinite mean".into())),
        }
    }
    let k = space.len();
    let mut partial_mean = vec![Interval::ZERO; d];
    if k > 0 {
        let gram: Vec<RatVec> = (0..k).map(|i| RatVec((0..k).map(|j| space[i].dot(&space[j])).collect())).collect();
        let ginv = linalg::inverse(&gram).expect("independent basis");
        for i in 0..k {
            let ai = (0..k).fold(Interval::ZERO, |acc, j| acc + Interval::from_rat(&ginv[i][j]) * values[j]);
            for (c, b) in partial_mean.iter_mut().zip(space[i].iter()) {
                if *b != Rat::from_integer(0.into()) {
                    *c = *c + ai * Interval::from_rat(b);
                }
            }
        }
    }
    Ok(IntegrabilityProfile { space, constraints, partial_mean })
}

/// The one-sided derivative of `Lambda` at `theta` along `tau`: the mean of
/// `<tau, .>` under `Q_theta`, possibly `-inf`.
pub fn directional_derivative(mu: &MixedMeasure, theta: &Tilt, tau: &RatVec, eps: f64) -> Result<Moment> {
    if tau.dim() != mu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, got: tau.dim() });
    }
    if !domain(mu).contains(theta)? {
        return Err(Error::DomainViolation);
    }
    for f in &mu.families {
        if f.is_curve() {
            match theta.sign_dot(&f.quad)? {
                Ordering::Less => continue,
                Ordering::Greater => unreachable!("checked against the domain"),
                Ordering::Equal => match f.quad.dot(tau).cmp(&Rat::from_integer(0.into())) {
                    Ordering::Less => continue,
                    Ordering::Greater => return Err(Error::DirectionLeavesDomain),
                    Ordering::Equal => {}
                },
            }
        }
        if theta.sign_dot_plus_ln(&f.lin, &f.rho)? == Ordering::Equal && f.lin.dot(tau) > Rat::from_integer(0.into()) {
            return Err(Error::DirectionLeavesDomain);
        }
    }
    let lz = log_partition(mu, theta, eps / 16.0)?;
    moment(mu, theta, lz, tau, Select::All, eps / 2.0)
}
