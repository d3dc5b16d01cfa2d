//! Neat sequences and variation witnesses.
//!
//! A member `Q_{F,theta}` with `theta ∈ pi_F(ri Xi)` is approached from
//! `ri(Xi)` along the accessible chain `tau_1..tau_m` to `F`. Each `tau_i`
//! is lifted to `w_i ∈ rec(cl Xi)` with `pi_{F_{i-1}}(w_i) = tau_i`, and the
//! parameters are `theta_0 + sum_i c_i w_i` with `pi_F(theta_0) = theta`.
//! Every `w_i` is orthogonal to `lin(F)`, so the conditioned member on `F`
//! never moves; the coefficients are doubled level by level, deepest first,
//! until each conditional mass defect is small enough.

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::poly::{Equality, HPolyhedron};
use crate::exactgeom::rat::{Rat, RatVec};
use crate::expfam::divergence::{ln_face_mass, variation_distance};
use crate::expfam::eval::Tilt;
use crate::expfam::member::FamilyMember;
use crate::expfam::param::ParamSet;
use crate::faces::{expose, is_accessible, Accessibility, FaceHandle};
use crate::interval::Interval;
use crate::measure::MixedMeasure;

/// Doublings allowed per level and step before giving up.
const MAX_DOUBLINGS: usize = 80;

/// The chain, its faces and the lifted directions for one target face.
#[derive(Clone, Debug)]
pub struct NeatPlan {
    pub chain: Vec<RatVec>,
    /// `F_0 = top, ..., F_m = F`.
    pub faces: Vec<FaceHandle>,
    pub lifts: Vec<RatVec>,
    closure: HPolyhedron,
}

impl NeatPlan {
    pub fn new(mu: &MixedMeasure, xi: &ParamSet, face: &FaceHandle) -> Result<NeatPlan> {
        let chain = match is_accessible(mu, face, xi)? {
            Accessibility::Accessible { chain } => chain,
            Accessibility::NotAccessible(r) => {
                return Err(Error::InvalidInput(format!("face is not accessible: step {} fails", r.step)))
            }
            Accessibility::SearchIncomplete { reason, .. } => return Err(Error::Unsupported(reason)),
        };
        let rec = xi.recession()?;
        let mut faces = vec![FaceHandle::top(mu)];
        let mut lifts = Vec::with_capacity(chain.len());
        for tau in &chain {
            let prev = faces.last().expect("top");
            let w = if rec.contains(tau) {
                tau.clone()
            } else {
                let mut p = rec.clone();
                for b in &prev.flat.basis {
                    p.equalities.push(Equality::new(b.clone(), b.dot(tau)));
                }
                if p.is_empty() {
                    return Err(Error::InvalidInput("chain direction has no lift into the recession cone".into()));
                }
                p.ri_query()?.point
            };
            lifts.push(w);
            let next = expose(prev, tau)?;
            faces.push(next);
        }
        Ok(NeatPlan { chain, faces, lifts, closure: xi.closure.clone() })
    }

    pub fn target(&self) -> &FaceHandle {
        self.faces.last().expect("top")
    }

    pub fn depth(&self) -> usize {
        self.chain.len()
    }

    /// A point of `ri(Xi)` projecting to `theta` on `lin(F)`.
    pub fn base_point(&self, theta: &RatVec) -> Result<RatVec> {
        let f = self.target();
        let mut pre = self.closure.clone();
        for b in &f.flat.basis {
            pre.equalities.push(Equality::new(b.clone(), b.dot(theta)));
        }
        if pre.is_empty() {
            return Err(Error::ThetaNotInRelativeInterior);
        }
        let ri = pre.ri_query()?;
        let full = self.closure.ri_query()?;
        if !full.contains(&ri.point) {
            return Err(Error::ThetaNotInRelativeInterior);
        }
        Ok(ri.point)
    }

    fn param(&self, base: &RatVec, coeffs: &[Rat]) -> RatVec {
        coeffs.iter().zip(&self.lifts).fold(base.clone(), |acc, (c, w)| acc.axpy(c, w))
    }

    /// `ln Q_theta(cl F_i | cl F_{i-1})`.
    fn ln_level_mass(&self, i: usize, param: &RatVec, eps: f64) -> Result<Interval> {
        let member = FamilyMember::new(self.faces[i - 1].clone(), Tilt::exact(param))?;
        ln_face_mass(&member, &self.faces[i].flat, eps)
    }

    /// `ln Q_theta(cl F)`.
    pub fn ln_mass(&self, param: &RatVec, eps: f64) -> Result<Interval> {
        let member = FamilyMember::new(self.faces[0].clone(), Tilt::exact(param))?;
        ln_face_mass(&member, &self.target().flat, eps)
    }

    /// Raises the coefficients (never lowers them) until every conditional
    /// mass defect is at most `defect / m`. Returns the parameter.
    pub fn lift(&self, base: &RatVec, coeffs: &mut [Rat], floor: &Rat, defect: f64) -> Result<RatVec> {
        let m = self.depth();
        if m == 0 {
            return Ok(base.clone());
        }
        let per_level = defect / m as f64;
        let ln_keep = (-per_level).ln_1p();
        let eps = (per_level * 1e-3).max(1e-300);
        for i in (1..=m).rev() {
            if coeffs[i - 1] < *floor {
                coeffs[i - 1] = floor.clone();
            }
            let mut tries = 0;
            loop {
                let p = self.param(base, coeffs);
                if self.ln_level_mass(i, &p, eps)?.lo >= ln_keep {
                    break;
                }
                tries += 1;
                if tries > MAX_DOUBLINGS {
                    return Err(Error::PrecisionUnreachable("neat lift did not reach the requested mass".into()));
                }
                coeffs[i - 1] = &coeffs[i - 1] * Rat::from_integer(2.into());
            }
        }
        Ok(self.param(base, coeffs))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NeatStep {
    pub param: RatVec,
    /// Certified `ln Q(cl F)`.
    pub ln_mass: Interval,
}

/// `n` parameters in `ri(Xi)` with `pi_F = theta` and strictly increasing
/// certified mass on `cl F`.
pub fn neat_sequence(mu: &MixedMeasure, xi: &ParamSet, face: &FaceHandle, theta: &RatVec, n: usize) -> Result<Vec<NeatStep>> {
    let plan = NeatPlan::new(mu, xi, face)?;
    let theta = face.lin().project(theta);
    if !xi.projected_closure(&face.lin())?.ri_query()?.contains(&theta) {
        return Err(Error::ThetaNotInRelativeInterior);
    }
    let base = plan.base_point(&theta)?;
    let mut coeffs = vec![Rat::one(); plan.depth()];
    let mut out: Vec<NeatStep> = Vec::with_capacity(n);
    for j in 1..=n {
        let floor = Rat::from_integer(j.into());
        let defect = 0.5f64.powi(j as i32);
        let mut param = plan.lift(&base, &mut coeffs, &floor, defect)?;
        let mut ln_mass = plan.ln_mass(&param, defect * 1e-3)?;
        if let Some(prev) = out.last() {
            let mut tries = 0;
            while plan.depth() > 0 && ln_mass.lo <= prev.ln_mass.lo {
                tries += 1;
                if tries > MAX_DOUBLINGS {
                    return Err(Error::PrecisionUnreachable("neat masses stopped increasing".into()));
                }
                coeffs[0] = &coeffs[0] * Rat::from_integer(2.into());
                param = plan.param(&base, &coeffs);
                ln_mass = plan.ln_mass(&param, defect * 1e-3)?;
            }
        }
        out.push(NeatStep { param, ln_mass });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessEntry {
    pub param: RatVec,
    /// Parameter of the intermediate member on `F`.
    pub inner: RatVec,
    /// Certified variation distance to the target.
    pub distance: Interval,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSequence {
    pub entries: Vec<WitnessEntry>,
    /// Whether the last distance is below the requested bound.
    pub reached: bool,
    /// No inner sequence was needed (`theta ∈ pi_F(ri Xi)`).
    pub single_level: bool,
}

/// Parameters in `Xi` whose members approach `member` in variation, up to
/// `max_len` of them or until the distance drops below `eps`.
pub fn witness_sequence(
    mu: &MixedMeasure,
    xi: &ParamSet,
    member: &FamilyMember,
    eps: f64,
    max_len: usize,
) -> Result<WitnessSequence> {
    let face = &member.face;
    let theta = member
        .exact_theta()
        .cloned()
        .ok_or_else(|| Error::Unsupported("witness sequences need a rational parameter".into()))?;
    let plan = NeatPlan::new(mu, xi, face)?;
    let projected = xi.projected_closure(&face.lin())?;
    if !projected.contains(&theta) {
        return Err(Error::InvalidInput("parameter outside the projected closure".into()));
    }
    let ri = projected.ri_query()?;
    let single_level = ri.contains(&theta);
    let mut coeffs = vec![Rat::one(); plan.depth()];
    let mut entries = Vec::new();
    let tol = (eps * 1e-3).max(1e-14);
    for n in 1..=max_len {
        let half_n = Rat::new(1.into(), num_bigint::BigInt::from(2u8).pow(n as u32));
        let inner = if single_level { theta.clone() } else { theta.axpy(&half_n, &ri.point.sub(&theta)) };
        let inner_gap = if single_level {
            Interval::ZERO
        } else {
            let q = FamilyMember::new(face.clone(), Tilt::exact(&inner))?;
            variation_distance(&q, member, tol)?
        };
        let defect = if single_level { 0.5f64.powi(n as i32) } else { (inner_gap.hi / 2.0).max(eps / 8.0) };
        let base = plan.base_point(&inner)?;
        let floor = Rat::from_integer(n.into());
        let param = plan.lift(&base, &mut coeffs, &floor, defect)?;
        let q = FamilyMember::new(FaceHandle::top(mu), Tilt::exact(&param))?;
        let distance = variation_distance(&q, member, tol)?;
        let done = distance.hi < eps;
        entries.push(WitnessEntry { param, inner, distance });
        if done {
            break;
        }
    }
    let reached = entries.last().is_some_and(|e| e.distance.hi < eps);
    Ok(WitnessSequence { entries, reached, single_level })
}
