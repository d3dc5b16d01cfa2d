//! Membership in the variation, I- and rI-closures of `E_Xi`.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::flat::AffineFlat;
use crate::exactgeom::poly::{HPolyhedron, Inequality};
use crate::exactgeom::rat::{Rat, RatVec};
use crate::expfam::domain::PieceText;
use crate::expfam::eval::Tilt;
use crate::expfam::member::{integrability, FamilyMember};
use crate::expfam::param::ParamSet;
use crate::faces::{accessible_faces, is_accessible, Accessibility, FaceHandle};
use crate::measure::MixedMeasure;

use super::catalog::face_parameters;
use super::neat::neat_sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClosureKind {
    #[serde(rename = "variation")]
    Variation,
    #[serde(rename = "I")]
    I,
    #[serde(rename = "rI")]
    RI,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureWitness {
    pub chain: Vec<RatVec>,
    /// The closed parameter set the member's parameter was found in.
    pub parameter_certificate: PieceText,
    pub neat_prefix: Vec<RatVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailingCondition {
    /// I-closure members lie in the family itself.
    NotTopFace,
    Accessibility,
    Parameter,
    /// `Xi ∩ (theta + M(P))` is empty.
    EmptyTranslate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureRefutation {
    pub condition: FailingCondition,
    pub failing_step: Option<usize>,
    /// A constraint of the closed parameter set that the parameter violates.
    pub separating: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RiExtras {
    /// `ri(Xi)` meets `theta + M(P)`, which is already sufficient.
    pub shortcut: bool,
    /// `M(P)` is everything, so membership matches the variation closure.
    pub has_mean: bool,
    /// Basis of `M(P)`.
    pub m_basis: Vec<RatVec>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureVerdict {
    pub kind: ClosureKind,
    pub face_chain: Vec<RatVec>,
    pub theta: Vec<String>,
    pub decision: Decision,
    pub witness: Option<ClosureWitness>,
    pub refutation: Option<ClosureRefutation>,
    /// Directions found before an incomplete search gave up.
    pub partial_chain: Option<Vec<RatVec>>,
    /// Why the decision is unknown.
    pub note: Option<String>,
    pub ri: Option<RiExtras>,
}

impl ClosureVerdict {
    fn new(kind: ClosureKind, member: &FamilyMember) -> Self {
        ClosureVerdict {
            kind,
            face_chain: member.face.chain.clone(),
            theta: member.theta.describe(),
            decision: Decision::Unknown,
            witness: None,
            refutation: None,
            partial_chain: None,
            note: None,
            ri: None,
        }
    }

    fn refute(mut self, condition: FailingCondition, failing_step: Option<usize>, separating: Option<String>, detail: String) -> Self {
        self.decision = Decision::False;
        self.refutation = Some(ClosureRefutation { condition, failing_step, separating, detail });
        self
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.decision {
            Decision::True => Some(true),
            Decision::False => Some(false),
            Decision::Unknown => None,
        }
    }
}

/// Sign of `<n, theta> - b`.
fn sign_affine(theta: &Tilt, n: &RatVec, b: &Rat) -> Result<Ordering> {
    if let Some(e) = &theta.exact {
        return Ok((e.dot(n) - b).cmp(&Rat::zero()));
    }
    if b.is_zero() {
        return theta.sign_dot(n);
    }
    // a log of a rational never equals a nonzero rational, so intervals decide
    let v = theta.dot(n) - crate::interval::Interval::from_rat(b);
    if v.lo > 0.0 {
        Ok(Ordering::Greater)
    } else if v.hi < 0.0 {
        Ok(Ordering::Less)
    } else {
        Err(Error::PrecisionUnreachable("parameter too close to a constraint".into()))
    }
}

/// The first constraint of `p` that `theta` violates, as text.
pub fn tilt_violation(theta: &Tilt, p: &HPolyhedron) -> Result<Option<String>> {
    for e in &p.equalities {
        if sign_affine(theta, &e.normal, &e.offset)? != Ordering::Equal {
            let one = HPolyhedron::new(p.dim, vec![], vec![e.clone()]);
            return Ok(PieceText::of(&one).constraints.pop());
        }
    }
    for i in &p.inequalities {
        let s = sign_affine(theta, &i.normal, &i.offset)?;
        if s == Ordering::Greater || (i.strict && s == Ordering::Equal) {
            let one = HPolyhedron::new(p.dim, vec![i.clone()], vec![]);
            return Ok(PieceText::of(&one).constraints.pop());
        }
    }
    Ok(None)
}

/// Is `member` a variation limit of members with parameters in `xi`?
/// A positive verdict carries up to `neat_len` neat parameters.
pub fn in_variation_closure(mu: &MixedMeasure, xi: &ParamSet, member: &FamilyMember, neat_len: usize) -> Result<ClosureVerdict> {
    variation_verdict(ClosureKind::Variation, mu, xi, member, neat_len)
}

fn variation_verdict(
    kind: ClosureKind,
    mu: &MixedMeasure,
    xi: &ParamSet,
    member: &FamilyMember,
    neat_len: usize,
) -> Result<ClosureVerdict> {
    let v = ClosureVerdict::new(kind, member);
    let face = &member.face;
    let chain = match is_accessible(mu, face, xi)? {
        Accessibility::Accessible { chain } => chain,
        Accessibility::NotAccessible(r) => {
            return Ok(v.refute(FailingCondition::Accessibility, Some(r.step), None, r.reason));
        }
        Accessibility::SearchIncomplete { prefix, reason } => {
            let mut v = v;
            v.partial_chain = Some(prefix);
            v.note = Some(reason);
            return Ok(v);
        }
    };
    let set = xi.projected_closure(&face.lin())?.canonical()?;
    if let Some(c) = tilt_violation(&member.theta, &set)? {
        return Ok(v.refute(
            FailingCondition::Parameter,
            None,
            Some(c),
            "parameter outside the closure of the projected parameter set".into(),
        ));
    }
    let mut neat_prefix = Vec::new();
    if neat_len > 0 {
        if let Some(theta) = member.exact_theta() {
            if set.ri_query()?.contains(theta) {
                // the prefix is illustrative; a numeric failure leaves it empty
                if let Ok(steps) = neat_sequence(mu, xi, face, theta, neat_len) {
                    neat_prefix = steps.into_iter().map(|s| s.param).collect();
                }
            }
        }
    }
    let mut v = v;
    v.decision = Decision::True;
    v.witness = Some(ClosureWitness { chain, parameter_certificate: PieceText::of(&set), neat_prefix });
    Ok(v)
}

/// One component of the variation closure.
#[derive(Clone, Debug)]
pub struct ClosureComponent {
    pub face: FaceHandle,
    pub chain: Vec<RatVec>,
    /// `cl(pi_F(Xi)) ∩ Theta_F` as pieces.
    pub parameters: Vec<HPolyhedron>,
}

/// The whole variation closure, one entry per accessible face.
pub fn variation_closure(mu: &MixedMeasure, xi: &ParamSet) -> Result<Vec<ClosureComponent>> {
    let mut out = Vec::new();
    for (face, chain) in accessible_faces(mu, xi)? {
        let set = xi.projected_closure(&face.lin())?;
        let mut parameters = Vec::new();
        for p in face_parameters(&face)? {
            let q = p.intersect(&set);
            if !q.is_empty() {
                parameters.push(q.canonical()?);
            }
        }
        if !parameters.is_empty() {
            out.push(ClosureComponent { face, chain, parameters });
        }
    }
    Ok(out)
}

/// Is `member` an information limit? Only members of the family with
/// parameters in `cl(Xi)` are.
pub fn in_i_closure(xi: &ParamSet, member: &FamilyMember) -> Result<ClosureVerdict> {
    let v = ClosureVerdict::new(ClosureKind::I, member);
    if !member.face.is_top() {
        return Ok(v.refute(FailingCondition::NotTopFace, None, None, "member lives on a proper face".into()));
    }
    let set = xi.closure.canonical()?;
    if let Some(c) = tilt_violation(&member.theta, &set)? {
        return Ok(v.refute(FailingCondition::Parameter, None, Some(c), "parameter outside the closure of the parameter set".into()));
    }
    let mut v = v;
    v.decision = Decision::True;
    v.witness = Some(ClosureWitness { chain: vec![], parameter_certificate: PieceText::of(&set), neat_prefix: vec![] });
    Ok(v)
}

/// Is `member` a reverse information limit? Decided as a variation limit of
/// the parameters in `Xi ∩ (theta + M(P))`.
pub fn in_ri_closure(mu: &MixedMeasure, xi: &ParamSet, member: &FamilyMember, neat_len: usize) -> Result<ClosureVerdict> {
    let d = mu.dim;
    let profile = integrability(member, 1e-9)?;
    let has_mean = profile.space.len() == d;
    let Some(theta) = member.exact_theta().cloned() else {
        if has_mean {
            let mut v = variation_verdict(ClosureKind::RI, mu, xi, member, neat_len)?;
            v.ri = Some(RiExtras { shortcut: !xi.relative_interior().is_empty(), has_mean, m_basis: profile.space });
            return Ok(v);
        }
        return Err(Error::Unsupported("translate of M(P) through an irrational parameter".into()));
    };
    let translate = AffineFlat::new(theta.clone(), &profile.space);
    let shortcut = !xi.relative_interior().intersect(&HPolyhedron::from_flat(&translate)).is_empty();
    let extras = RiExtras { shortcut, has_mean, m_basis: profile.space.clone() };
    let narrowed = match xi.cut_by_translate(&theta, &profile.space_flat(d)) {
        Ok(x) => x,
        Err(Error::Empty) => {
            let mut v = ClosureVerdict::new(ClosureKind::RI, member).refute(
                FailingCondition::EmptyTranslate,
                None,
                None,
                "no parameter of the set has finite divergence from the member".into(),
            );
            v.ri = Some(extras);
            return Ok(v);
        }
        Err(e) => return Err(e),
    };
    let mut v = variation_verdict(ClosureKind::RI, mu, &narrowed, member, neat_len)?;
    v.ri = Some(extras);
    Ok(v)
}

/// `{x : <n, x> <= b}` or its strict form, for tests and callers building
/// parameter sets by hand.
pub fn halfspace(n: RatVec, b: Rat, strict: bool) -> HPolyhedron {
    let d = n.dim();
    let i = if strict { Inequality::strict(n, b) } else { Inequality::new(n, b) };
    HPolyhedron::new(d, vec![i], vec![])
}
