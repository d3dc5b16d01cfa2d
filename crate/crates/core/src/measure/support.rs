use crate::error::{Error, Result};
use crate::exactgeom::flat::AffineFlat;
use crate::exactgeom::lattice::face_containing;
use crate::exactgeom::lp::LpOutcome;
use crate::exactgeom::poly::{hull_polyhedron, HPolyhedron};
use crate::exactgeom::rat::{Rat, RatVec};
use crate::expfam::eval::{log_sum, Select, Tilt};
use crate::interval::Interval;

use super::{AtomFamily, MixedMeasure};

#[derive(Clone, Debug)]
pub enum Support {
    Polyhedral(HPolyhedron),
    /// Curve families present: only the affine hull and the directions along
    /// which the support is unbounded are reported.
    NonPolyhedral { flat: AffineFlat, directions: Vec<RatVec> },
}

impl Support {
    pub fn polyhedron(&self) -> Result<&HPolyhedron> {
        match self {
            Support::Polyhedral(p) => Ok(p),
            Support::NonPolyhedral { .. } => Err(Error::Unsupported("curve families have no polyhedral support".into())),
        }
    }
}

pub fn convex_support(mu: &MixedMeasure) -> Result<Support> {
    if mu.has_curves() {
        let directions = mu.families.iter().flat_map(AtomFamily::directions).collect();
        return Ok(Support::NonPolyhedral { flat: mu.affine_hull(), directions });
    }
    let steps: Vec<RatVec> = mu.families.iter().map(|f| f.lin.clone()).collect();
    Ok(Support::Polyhedral(hull_polyhedron(&mu.anchor_points(), &steps)?))
}

/// Whether `x` is the mean of some probability measure dominated by `mu`.
///
/// Works down the faces: `x` lies in the relative interior of exactly one face
/// `G` of the support, any representing measure lives on `G`, and the relative
/// interior of the support of `mu` restricted to `G` belongs to the core.
pub fn core_membership(mu: &MixedMeasure, x: &RatVec) -> Result<bool> {
    if mu.has_curves() {
        return Err(Error::Unsupported("core membership for curve families".into()));
    }
    if x.dim() != mu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, got: x.dim() });
    }
    let mut cur = mu.clone();
    loop {
        let cs = convex_support(&cur)?.polyhedron()?.canonical()?;
        if cs.ri_query()?.contains(x) {
            return Ok(true);
        }
        let gens = cs.generators()?;
        let Some(face) = face_containing(&cs, &gens, x) else {
            return Ok(false);
        };
        cur = match cur.restrict(&face.flat()) {
            Ok(m) => m,
            Err(Error::EmptyRestriction) => return Ok(false),
            Err(e) => return Err(e),
        };
    }
}

#[derive(Clone, Debug)]
pub enum Region {
    All,
    Flat(AffineFlat),
    /// `<normal, x> >= offset`.
    Halfspace { normal: RatVec, offset: Rat },
}

/// Certified enclosure of `mu(region)` with width at most `eps`.
pub fn mass(mu: &MixedMeasure, region: &Region, eps: f64) -> Result<Interval> {
    let sel = match region {
        Region::All => Select::All,
        Region::Flat(f) => Select::On(f),
        Region::Halfspace { normal, offset } => Select::HalfGe(normal, offset),
    };
    let zero = Tilt::exact(&RatVec::zeros(mu.dim));
    let Some(rough) = log_sum(mu, &zero, sel, 1e-3)? else {
        return Ok(Interval::ZERO);
    };
    let mut rel = eps / (4.0 * rough.exp().hi);
    for _ in 0..8 {
        let v = log_sum(mu, &zero, sel, rel)?.expect("nonempty selection").exp();
        if v.width() <= eps {
            return Ok(v);
        }
        rel /= 8.0;
    }
    Err(Error::PrecisionUnreachable(format!("mass to within {eps:e}")))
}

#[derive(Clone, Debug)]
pub struct Lemma1Report {
    pub mass: Interval,
    /// The hyperplane meets the convex core.
    pub face_nonempty: bool,
    /// Every atom on the hyperplane lies in the closure of the exposed face.
    pub residual_zero: bool,
    /// Positive mass and a nonempty face were found together or not at all.
    pub equivalence_holds: bool,
}

/// Checks that positive mass on a supporting hyperplane goes together with a
/// nonempty face of the core.
pub fn lemma1_check(mu: &MixedMeasure, normal: &RatVec, offset: &Rat) -> Result<Lemma1Report> {
    let cs = convex_support(mu)?.polyhedron()?.clone();
    let supports = |n: &RatVec, b: &Rat| matches!(cs.maximize(n), LpOutcome::Optimal { value, .. } if &value == b);
    if !supports(normal, offset) && !supports(&normal.neg(), &-offset.clone()) {
        return Err(Error::NotSupporting);
    }
    let h = AffineFlat::whole(mu.dim)
        .intersect_hyperplane(normal, offset)
        .ok_or(Error::NotSupporting)?;
    let m = mass(mu, &Region::Flat(h.clone()), 1e-12)?;
    let (face_nonempty, residual_zero) = match mu.restrict(&h) {
        Err(Error::EmptyRestriction) => (false, true),
        Err(e) => return Err(e),
        Ok(sub) => {
            let witness = sub.anchor_points().swap_remove(0);
            let on_core = core_membership(mu, &witness)?;
            let closure = convex_support(&sub)?.polyhedron()?.clone();
            let inside = sub.anchor_points().iter().all(|p| closure.contains_closed(p))
                && sub.families.iter().all(|f| closure.recession_contains(&f.lin));
            (on_core, inside)
        }
    };
    let positive = m.lo > 0.0;
    Ok(Lemma1Report { mass: m, face_nonempty, residual_zero, equivalence_holds: positive == face_nonempty })
}
