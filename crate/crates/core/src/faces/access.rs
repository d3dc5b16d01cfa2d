//! Adaptedness of access sequences and accessibility of faces relative to a
//! parameter set.
//!
//! The search descends greedily. At a face `F` above the target `T`, let `K`
//! be the cone of directions in `lin F` whose argmax over `F` contains `T`,
//! cut down to `rec(pi_F cl Xi)`. Argmax sets of directions in `K` are closed
//! under intersection (sum the directions), so a relative-interior direction
//! of `K` exposes the smallest face reachable from `F` that still contains
//! `T`. Projecting any adapted chain onto that face gives another adapted
//! chain, which makes the descent complete: `K = {0}` refutes accessibility.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::poly::{Equality, HPolyhedron, Inequality};
use crate::exactgeom::rat::{Rat, RatVec};
use crate::expfam::param::ParamSet;
use crate::measure::{AtomFamily, MixedMeasure, OnFlat};

use super::expose::{enumerate_faces, expose, verify_access_sequence};
use super::FaceHandle;

/// Atom prefix used for curves in the strict branch, raised on failure.
const CURVE_PREFIX: u64 = 16;
const CURVE_PREFIX_MAX: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub direction: RatVec,
    pub in_recession: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdaptedReport {
    pub adapted: bool,
    /// First failing step, 1-based.
    pub failing_step: Option<usize>,
    pub steps: Vec<StepReport>,
}

/// Checks `tau_i ∈ rec(pi_{F_{i-1}} cl Xi)` along a verified sequence.
pub fn is_adapted(mu: &MixedMeasure, seq: &[RatVec], xi: &ParamSet) -> Result<AdaptedReport> {
    verify_access_sequence(mu, seq)?;
    let mut face = FaceHandle::top(mu);
    let mut steps = Vec::with_capacity(seq.len());
    for (i, tau) in seq.iter().enumerate() {
        let rec = xi.projected_closure(&face.lin())?.recession_cone()?;
        steps.push(StepReport { index: i + 1, direction: tau.clone(), in_recession: rec.contains(tau) });
        face = expose(&face, tau)?;
    }
    let failing_step = steps.iter().find(|s| !s.in_recession).map(|s| s.index);
    Ok(AdaptedReport { adapted: failing_step.is_none(), failing_step, steps })
}

/// Why the descent stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    /// The step that cannot be taken, 1-based.
    pub step: usize,
    /// Chain to the deepest face containing the target that is reachable.
    pub prefix: Vec<RatVec>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Accessibility {
    Accessible { chain: Vec<RatVec> },
    NotAccessible(Refutation),
    /// Some curve branch could not be certified; the prefix is still valid.
    SearchIncomplete { prefix: Vec<RatVec>, reason: String },
}

impl Accessibility {
    pub fn is_accessible(&self) -> Option<bool> {
        match self {
            Accessibility::Accessible { .. } => Some(true),
            Accessibility::NotAccessible(_) => Some(false),
            Accessibility::SearchIncomplete { .. } => None,
        }
    }

    pub fn chain(&self) -> Option<&[RatVec]> {
        match self {
            Accessibility::Accessible { chain } => Some(chain),
            _ => None,
        }
    }
}

/// What the argmax must keep: a face, or a finite set of atoms.
#[derive(Clone, Copy)]
pub(crate) enum Anchor<'a> {
    Face(&'a FaceHandle),
    Atoms(&'a [RatVec]),
}

impl Anchor<'_> {
    fn point(&self) -> RatVec {
        match self {
            Anchor::Face(t) => t.restricted.anchor_points().into_iter().next().expect("faces are nonempty"),
            Anchor::Atoms(xs) => xs[0].clone(),
        }
    }

    fn holds(&self, x: &RatVec) -> bool {
        match self {
            Anchor::Face(t) => t.flat.contains(x),
            Anchor::Atoms(xs) => xs.contains(x),
        }
    }

    fn family_part(&self, f: &AtomFamily) -> OnFlat {
        match self {
            Anchor::Face(t) => f.indices_on(&t.flat),
            Anchor::Atoms(xs) => {
                let mut ks: Vec<u64> = xs.iter().filter_map(|x| f.index_of(x)).collect();
                ks.sort_unstable();
                ks.dedup();
                OnFlat::Some(ks)
            }
        }
    }

    fn kept_by(&self, face: &FaceHandle) -> bool {
        match self {
            Anchor::Face(t) => t.is_subface_of(face),
            Anchor::Atoms(xs) => xs.iter().all(|x| face.restricted.weight_at(x).is_some()),
        }
    }
}

/// Linear conditions on `tau` for the anchor to stay inside
/// `argmax_F <tau, .>`, split into one cone per choice of branch on the
/// curves not kept whole. The strict branch of a curve is relaxed to its
/// first `prefix` atoms.
fn normal_cone_branches(face: &FaceHandle, anchor: Anchor<'_>, prefix: u64) -> Vec<(HPolyhedron, bool)> {
    let d = face.restricted.dim;
    let zero = Rat::from_integer(0.into());
    let t0 = anchor.point();
    let mut base = HPolyhedron::whole(d);
    for n in face.flat.normals() {
        base.equalities.push(Equality::new(n, zero.clone()));
    }
    for a in &face.restricted.atoms {
        let diff = a.point.sub(&t0);
        if anchor.holds(&a.point) {
            base.equalities.push(Equality::new(diff, zero.clone()));
        } else {
            base.inequalities.push(Inequality::new(diff, zero.clone()));
        }
    }
    let mut curves: Vec<&AtomFamily> = Vec::new();
    for f in &face.restricted.families {
        match anchor.family_part(f) {
            OnFlat::All => {
                base.equalities.push(Equality::new(f.atom(1).sub(&t0), zero.clone()));
                base.equalities.push(Equality::new(f.lin.clone(), zero.clone()));
                if f.is_curve() {
                    base.equalities.push(Equality::new(f.quad.clone(), zero.clone()));
                }
            }
            OnFlat::Some(ks) => {
                for k in ks {
                    base.equalities.push(Equality::new(f.atom(k).sub(&t0), zero.clone()));
                }
                if f.is_curve() {
                    curves.push(f);
                } else {
                    base.inequalities.push(Inequality::new(f.lin.clone(), zero.clone()));
                    base.inequalities.push(Inequality::new(f.atom(1).sub(&t0), zero.clone()));
                }
            }
        }
    }
    // (cone, uses a relaxed strict branch)
    let mut out = vec![(base, false)];
    for f in curves {
        let mut next = Vec::with_capacity(out.len() * 2);
        for (p, relaxed) in out {
            let mut tied = p.clone();
            tied.equalities.push(Equality::new(f.quad.clone(), zero.clone()));
            tied.inequalities.push(Inequality::new(f.lin.clone(), zero.clone()));
            tied.inequalities.push(Inequality::new(f.atom(1).sub(&t0), zero.clone()));
            next.push((tied, relaxed));
            let mut strict = p;
            strict.inequalities.push(Inequality::strict(f.quad.clone(), zero.clone()));
            for k in 1..=prefix {
                strict.inequalities.push(Inequality::new(f.atom(k).sub(&t0), zero.clone()));
            }
            next.push((strict, true));
        }
        out = next;
    }
    out
}

/// A nonzero relative-interior direction of a cone, if the cone is not `{0}`.
fn interior_direction(cone: &HPolyhedron) -> Result<Option<RatVec>> {
    if cone.is_empty() {
        return Ok(None);
    }
    let g = cone.closed().generators()?;
    let mut tau = RatVec::zeros(cone.dim);
    for r in &g.rays {
        tau = tau.add(r);
    }
    Ok(if tau.is_zero() { None } else { Some(tau.primitive()) })
}

pub(crate) enum Step {
    Direction(RatVec),
    Stuck,
    Incomplete(String),
}

/// The direction exposing the smallest face below `face` that keeps the
/// anchor and respects `rec`.
pub(crate) fn descent_direction(face: &FaceHandle, anchor: Anchor<'_>, rec: &HPolyhedron) -> Result<Step> {
    let mut total = RatVec::zeros(face.restricted.dim);
    let mut dropped = false;
    let branch_count = normal_cone_branches(face, anchor, 1).len();
    for b in 0..branch_count {
        let mut prefix = CURVE_PREFIX;
        loop {
            let (cone, relaxed) = normal_cone_branches(face, anchor, prefix).swap_remove(b);
            let Some(tau) = interior_direction(&cone.intersect(rec))? else {
                break;
            };
            if !relaxed || expose(face, &tau).is_ok_and(|g| anchor.kept_by(&g)) {
                total = total.add(&tau);
                break;
            }
            if prefix >= CURVE_PREFIX_MAX {
                dropped = true;
                break;
            }
            prefix *= 4;
        }
    }
    if !total.is_zero() {
        return Ok(Step::Direction(total.primitive()));
    }
    Ok(if dropped {
        Step::Incomplete("a curve branch could not be certified within the atom prefix cap".into())
    } else {
        Step::Stuck
    })
}

/// Decides whether `target` is accessible relative to `xi`.
pub fn is_accessible(mu: &MixedMeasure, target: &FaceHandle, xi: &ParamSet) -> Result<Accessibility> {
    let top = FaceHandle::top(mu);
    if target.restricted.dim != mu.dim || !target.is_subface_of(&top) {
        return Err(Error::InvalidInput("target is not a face of this measure's core".into()));
    }
    let mut face = top;
    while !face.same_face(target) {
        let rec = xi.projected_closure(&face.lin())?.recession_cone()?;
        match descent_direction(&face, Anchor::Face(target), &rec)? {
            Step::Direction(tau) => {
                let next = expose(&face, &tau)?;
                debug_assert!(target.is_subface_of(&next));
                face = next;
            }
            Step::Stuck => {
                return Ok(Accessibility::NotAccessible(Refutation {
                    step: face.chain.len() + 1,
                    reason: format!(
                        "no direction in the recession cone of the projected parameter set exposes a face \
                         containing the target from the face of dimension {}",
                        face.dim()
                    ),
                    prefix: face.chain,
                }))
            }
            Step::Incomplete(reason) => {
                return Ok(Accessibility::SearchIncomplete { prefix: face.chain, reason });
            }
        }
    }
    Ok(Accessibility::Accessible { chain: face.chain })
}

/// The smallest face of the core whose closure holds every given atom.
pub fn minimal_face_containing(mu: &MixedMeasure, atoms: &[RatVec]) -> Result<FaceHandle> {
    if atoms.is_empty() {
        return Err(Error::EmptyInput);
    }
    if atoms.iter().any(|x| x.dim() != mu.dim || mu.weight_at(x).is_none()) {
        return Err(Error::NotDominated);
    }
    let free = HPolyhedron::whole(mu.dim);
    let mut face = FaceHandle::top(mu);
    loop {
        match descent_direction(&face, Anchor::Atoms(atoms), &free)? {
            Step::Direction(tau) => face = expose(&face, &tau)?,
            Step::Stuck => return Ok(face),
            Step::Incomplete(reason) => return Err(Error::Unsupported(reason)),
        }
    }
}

/// Every accessible face with a witness chain, in enumeration order.
pub fn accessible_faces(mu: &MixedMeasure, xi: &ParamSet) -> Result<Vec<(FaceHandle, Vec<RatVec>)>> {
    let mut out = Vec::new();
    for f in enumerate_faces(mu)? {
        if let Accessibility::Accessible { chain } = is_accessible(mu, &f, xi)? {
            out.push((f, chain));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::int;
    use crate::measure::{Atom, Weight};

    fn tri() -> MixedMeasure {
        MixedMeasure::finite(&[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])])
            .validate()
            .unwrap()
    }

    fn strip(mu: &MixedMeasure) -> ParamSet {
        let user = HPolyhedron::new(
            2,
            vec![
                Inequality::new(RatVec::from_ints(&[0, 1]), int(1)),
                Inequality::new(RatVec::from_ints(&[0, -1]), int(1)),
            ],
            vec![],
        );
        ParamSet::new(mu, user, true).unwrap()
    }

    fn ex3d() -> MixedMeasure {
        MixedMeasure::new(
            3,
            vec![Atom { point: RatVec::from_ints(&[-1, 0, 0]), weight: Weight::one() }],
            vec![
                AtomFamily::ray(RatVec::zeros(3), RatVec::from_ints(&[0, 1, 0]), int(1), int(2), int(1)),
                AtomFamily::curve(
                    RatVec::from_ints(&[0, 0, -1]),
                    RatVec::from_ints(&[1, 0, 0]),
                    RatVec::from_ints(&[0, 1, 0]),
                    int(1),
                    int(3),
                    int(2),
                ),
            ],
        )
        .validate()
        .unwrap()
    }

    #[test]
    fn triangle_strip() {
        let mu = tri();
        let xi = strip(&mu);
        let v20 = verify_access_sequence(&mu, &[RatVec::from_ints(&[1, -1])]).unwrap();
        let got = is_accessible(&mu, &v20, &xi).unwrap();
        assert_eq!(got.chain().unwrap(), &[RatVec::from_ints(&[1, 0])]);
        let v02 = verify_access_sequence(&mu, &[RatVec::from_ints(&[0, 1])]).unwrap();
        assert_eq!(is_accessible(&mu, &v02, &xi).unwrap().is_accessible(), Some(false));
        let rep = is_adapted(&mu, &[RatVec::from_ints(&[1, 0])], &xi).unwrap();
        assert!(rep.adapted);
        assert_eq!(accessible_faces(&mu, &xi).unwrap().len(), 3);
        assert_eq!(accessible_faces(&mu, &ParamSet::theta(&mu).unwrap()).unwrap().len(), 7);
    }

    #[test]
    fn minimal_faces() {
        let mu = tri();
        let edge = minimal_face_containing(&mu, &[RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])]).unwrap();
        assert_eq!(edge.dim(), 1);
        assert_eq!(edge.restricted.atoms.len(), 2);
        let v = minimal_face_containing(&mu, &[RatVec::from_ints(&[0, 0])]).unwrap();
        assert_eq!(v.dim(), 0);
        let all = minimal_face_containing(&mu, &[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])]);
        assert!(all.unwrap().is_top());
        assert_eq!(minimal_face_containing(&mu, &[RatVec::from_ints(&[1, 1])]).unwrap_err(), Error::NotDominated);
        let ex = ex3d();
        assert_eq!(minimal_face_containing(&ex, &[RatVec::from_ints(&[0, 3, 0])]).unwrap().dim(), 1);
        assert_eq!(minimal_face_containing(&ex, &[RatVec::from_ints(&[0, 1, 0])]).unwrap().dim(), 0);
        let curve_atoms = [RatVec::from_ints(&[1, 1, -1]), RatVec::from_ints(&[2, 4, -1])];
        assert_eq!(minimal_face_containing(&ex, &curve_atoms).unwrap().dim(), 1);
    }

    #[test]
    fn segment_half_line() {
        let mu = MixedMeasure::finite(&[RatVec::from_ints(&[0]), RatVec::from_ints(&[1])]).validate().unwrap();
        let user = HPolyhedron::new(1, vec![Inequality::new(RatVec::from_ints(&[-1]), int(0))], vec![]);
        let xi = ParamSet::new(&mu, user, true).unwrap();
        let faces = accessible_faces(&mu, &xi).unwrap();
        assert_eq!(faces.len(), 2);
        assert_eq!(faces[1].0.restricted.atoms[0].point, RatVec::from_ints(&[1]));
    }

    #[test]
    fn curve_example() {
        let mu = ex3d();
        let chain = [RatVec::from_ints(&[0, 0, 1]), RatVec::from_ints(&[1, 0, 0])];
        let f = verify_access_sequence(&mu, &chain).unwrap();
        assert!(f.restricted.atoms.is_empty() && f.restricted.families.len() == 1);
        let theta = ParamSet::theta(&mu).unwrap();
        assert!(is_adapted(&mu, &chain, &theta).unwrap().adapted);
        let prime = ParamSet::new(
            &mu,
            HPolyhedron::new(
                3,
                vec![Inequality::new(RatVec::from_ints(&[1, 0, 0]), int(0))],
                vec![Equality::new(RatVec::from_ints(&[0, 1, 0]), int(0))],
            ),
            true,
        )
        .unwrap();
        let rep = is_adapted(&mu, &chain, &prime).unwrap();
        assert_eq!(rep.failing_step, Some(2));
        assert_eq!(is_accessible(&mu, &f, &theta).unwrap().chain().unwrap(), &chain);
        match is_accessible(&mu, &f, &prime).unwrap() {
            Accessibility::NotAccessible(r) => assert_eq!(r.step, 2),
            other => panic!("{other:?}"),
        }
    }
}
