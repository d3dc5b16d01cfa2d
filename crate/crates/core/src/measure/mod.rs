//! Base measures: finite atoms plus ray and quadratic-curve atom families.

mod json;
mod support;
mod weight;

pub use json::{MeasureFile, RawAtom, RawCurve, RawRay};
pub use json::parse_vec;
pub use support::{convex_support, core_membership, lemma1_check, mass, Lemma1Report, Region, Support};
pub use weight::Weight;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::flat::{affine_hull, AffineFlat};
use crate::exactgeom::rat::{Rat, RatVec};

/// Collisions between family atoms and finite atoms are searched up to this index.
pub const COLLISION_SCAN: u64 = 1000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub point: RatVec,
    pub weight: Weight,
}

/// Atoms `base + k*lin + k^2*quad` with weights `scale * rho^k * k^(-alpha)`,
/// `k = 1, 2, ...`. A zero `quad` makes it a ray family.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AtomFamily {
    pub base: RatVec,
    pub lin: RatVec,
    pub quad: RatVec,
    pub rho: Rat,
    pub alpha: Rat,
    pub scale: Rat,
}

impl AtomFamily {
    pub fn ray(base: RatVec, step: RatVec, rho: Rat, alpha: Rat, scale: Rat) -> Self {
        let d = base.dim();
        AtomFamily { base, lin: step, quad: RatVec::zeros(d), rho, alpha, scale }
    }

    pub fn curve(base: RatVec, lin: RatVec, quad: RatVec, rho: Rat, alpha: Rat, scale: Rat) -> Self {
        AtomFamily { base, lin, quad, rho, alpha, scale }
    }

    pub fn is_curve(&self) -> bool {
        !self.quad.is_zero()
    }

    pub fn atom(&self, k: u64) -> RatVec {
        let kr = Rat::from_integer(BigInt::from(k));
        self.base.axpy(&kr, &self.lin).axpy(&(&kr * &kr), &self.quad)
    }

    pub fn weight(&self, k: u64) -> Weight {
        let rk = num_traits::pow(self.rho.clone(), k as usize);
        Weight::power(&self.scale * rk, k, &self.alpha)
    }

    /// Directions spanned by the family's atoms beyond the first.
    pub fn directions(&self) -> Vec<RatVec> {
        if self.is_curve() {
            vec![self.lin.clone(), self.quad.clone()]
        } else {
            vec![self.lin.clone()]
        }
    }

    /// Indices `k >= 1` with `atom(k)` on the flat.
    pub fn indices_on(&self, flat: &AffineFlat) -> OnFlat {
        let polys: Vec<[Rat; 3]> = flat
            .normals()
            .iter()
            .map(|n| [n.dot(&self.base.sub(&flat.base)), n.dot(&self.lin), n.dot(&self.quad)])
            .filter(|c| c.iter().any(|x| !x.is_zero()))
            .collect();
        let Some(first) = polys.first() else {
            return OnFlat::All;
        };
        let ks = positive_integer_roots(first)
            .into_iter()
            .filter(|&k| polys.iter().all(|c| eval_quadratic(c, k).is_zero()))
            .collect();
        OnFlat::Some(ks)
    }

    /// Index of `x` in the family, if it is an atom of it.
    pub fn index_of(&self, x: &RatVec) -> Option<u64> {
        match self.indices_on(&AffineFlat::point(x.clone())) {
            OnFlat::All => None,
            OnFlat::Some(ks) => ks.first().copied(),
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        for v in [&self.base, &self.lin, &self.quad] {
            if v.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.dim() });
            }
        }
        if self.lin.is_zero() && self.quad.is_zero() {
            return Err(Error::InvalidInput("family direction must be nonzero".into()));
        }
        if !self.scale.is_positive() {
            return Err(Error::ZeroWeight);
        }
        if !self.rho.is_positive() || self.rho > Rat::one() {
            return Err(Error::InvalidInput("rho must lie in (0, 1]".into()));
        }
        if self.alpha.is_negative() {
            return Err(Error::InvalidInput("alpha must be nonnegative".into()));
        }
        if self.rho.is_one() && self.alpha <= Rat::one() {
            return Err(Error::InfiniteMass);
        }
        // self-intersection: lin = -m quad with an integer m >= 3 gives atom(j) = atom(m - j)
        if self.is_curve() {
            if let Some(c) = crate::exactgeom::linalg::solve_combination(&[self.quad.clone()], &self.lin) {
                let m = -c[0].clone();
                if m.is_integer() && m >= Rat::from_integer(3.into()) {
                    return Err(Error::DuplicateAtomInFamily(1));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OnFlat {
    All,
    Some(Vec<u64>),
}

fn eval_quadratic(c: &[Rat; 3], k: u64) -> Rat {
    let kr = Rat::from_integer(BigInt::from(k));
    &c[0] + &c[1] * &kr + &c[2] * &kr * &kr
}

fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rat::new(n, d))
}

/// Integer roots `k >= 1` of `c0 + c1 k + c2 k^2` (not identically zero).
fn positive_integer_roots(c: &[Rat; 3]) -> Vec<u64> {
    let mut cands: Vec<Rat> = Vec::new();
    if c[2].is_zero() {
        if !c[1].is_zero() {
            cands.push(-&c[0] / &c[1]);
        }
    } else {
        let disc = &c[1] * &c[1] - Rat::from_integer(4.into()) * &c[2] * &c[0];
        if let Some(s) = rat_sqrt(&disc) {
            let two_a = Rat::from_integer(2.into()) * &c[2];
            cands.push((-&c[1] + &s) / &two_a);
            cands.push((-&c[1] - &s) / &two_a);
        }
    }
    let mut ks: Vec<u64> = cands
        .into_iter()
        .filter(|r| r.is_integer() && r.is_positive())
        .filter_map(|r| r.to_integer().to_u64())
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MixedMeasure {
    pub dim: usize,
    pub atoms: Vec<Atom>,
    pub families: Vec<AtomFamily>,
}

impl MixedMeasure {
    pub fn new(dim: usize, atoms: Vec<Atom>, families: Vec<AtomFamily>) -> Self {
        MixedMeasure { dim, atoms, families }
    }

    pub fn finite(points: &[RatVec]) -> Self {
        let dim = points.first().map_or(0, RatVec::dim);
        MixedMeasure {
            dim,
            atoms: points.iter().map(|p| Atom { point: p.clone(), weight: Weight::one() }).collect(),
            families: Vec::new(),
        }
    }

    /// Merges duplicate finite atoms and checks the family invariants.
    pub fn validate(mut self) -> Result<MixedMeasure> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if self.atoms.is_empty() && self.families.is_empty() {
            return Err(Error::EmptyInput);
        }
        for a in &self.atoms {
            if a.point.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: a.point.dim() });
            }
            if !a.weight.is_positive() {
                return Err(Error::ZeroWeight);
            }
        }
        for f in &self.families {
            f.validate(d)?;
        }
        self.atoms.sort_by(|a, b| a.point.cmp(&b.point));
        let mut merged: Vec<Atom> = Vec::new();
        for a in self.atoms.drain(..) {
            match merged.last_mut() {
                Some(l) if l.point == a.point => l.weight = l.weight.add(&a.weight),
                _ => merged.push(a),
            }
        }
        self.atoms = merged;
        for f in &self.families {
            for a in &self.atoms {
                if let Some(k) = f.index_of(&a.point) {
                    if k <= COLLISION_SCAN {
                        return Err(Error::DuplicateAtomInFamily(k));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn has_curves(&self) -> bool {
        self.families.iter().any(AtomFamily::is_curve)
    }

    /// Finite atoms and the first atom of each family.
    pub fn anchor_points(&self) -> Vec<RatVec> {
        let mut pts: Vec<RatVec> = self.atoms.iter().map(|a| a.point.clone()).collect();
        pts.extend(self.families.iter().map(|f| f.atom(1)));
        pts
    }

    pub fn affine_hull(&self) -> AffineFlat {
        let dirs: Vec<RatVec> = self.families.iter().flat_map(AtomFamily::directions).collect();
        affine_hull(&self.anchor_points(), &dirs).expect("validated measures have atoms")
    }

    /// `lin(mu)`: the linear space parallel to the affine hull of the support.
    pub fn lin(&self) -> AffineFlat {
        let a = self.affine_hull();
        AffineFlat { base: RatVec::zeros(self.dim), basis: a.basis }
    }

    /// `mu` restricted to a flat.
    pub fn restrict(&self, flat: &AffineFlat) -> Result<MixedMeasure> {
        let mut atoms: Vec<Atom> = self.atoms.iter().filter(|a| flat.contains(&a.point)).cloned().collect();
        let mut families = Vec::new();
        for f in &self.families {
            match f.indices_on(flat) {
                OnFlat::All => families.push(f.clone()),
                OnFlat::Some(ks) => {
                    atoms.extend(ks.into_iter().map(|k| Atom { point: f.atom(k), weight: f.weight(k) }))
                }
            }
        }
        if atoms.is_empty() && families.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        MixedMeasure { dim: self.dim, atoms, families }.validate()
    }

    /// Total weight at `x` over all components.
    pub fn weight_at(&self, x: &RatVec) -> Option<Weight> {
        let mut w: Option<Weight> = self.atoms.iter().find(|a| &a.point == x).map(|a| a.weight.clone());
        for f in &self.families {
            if let Some(k) = f.index_of(x) {
                let fw = f.weight(k);
                w = Some(match w {
                    Some(v) => v.add(&fw),
                    None => fw,
                });
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::int;

    #[test]
    fn merges_duplicates() {
        let m = MixedMeasure::new(
            2,
            vec![
                Atom { point: RatVec::from_ints(&[0, 0]), weight: Weight::rational(int(1)) },
                Atom { point: RatVec::from_ints(&[0, 0]), weight: Weight::rational(int(2)) },
            ],
            vec![],
        )
        .validate()
        .unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert_eq!(m.atoms[0].weight.as_rational(), Some(int(3)));
    }

    #[test]
    fn family_invariants() {
        let harmonic = AtomFamily::ray(RatVec::zeros(1), RatVec::from_ints(&[1]), int(1), int(1), int(1));
        assert_eq!(MixedMeasure::new(1, vec![], vec![harmonic]).validate(), Err(Error::InfiniteMass));
        let f = AtomFamily::ray(RatVec::zeros(1), RatVec::from_ints(&[1]), int(1), int(2), int(1));
        let m = MixedMeasure::new(
            1,
            vec![Atom { point: RatVec::from_ints(&[7]), weight: Weight::one() }],
            vec![f.clone()],
        );
        assert_eq!(m.validate(), Err(Error::DuplicateAtomInFamily(7)));
        let looped = AtomFamily::curve(
            RatVec::zeros(1),
            RatVec::from_ints(&[-3]),
            RatVec::from_ints(&[1]),
            int(1),
            int(2),
            int(1),
        );
        assert!(matches!(looped.validate(1), Err(Error::DuplicateAtomInFamily(_))));
        let _ = f;
    }

    #[test]
    fn curve_indices_on_plane() {
        // (k, k^2, -1) meets x2 = 4 at k = 2 only
        let c = AtomFamily::curve(
            RatVec::from_ints(&[0, 0, -1]),
            RatVec::from_ints(&[1, 0, 0]),
            RatVec::from_ints(&[0, 1, 0]),
            int(1),
            int(3),
            int(2),
        );
        let plane = AffineFlat::new(RatVec::from_ints(&[0, 4, 0]), &[RatVec::unit(3, 0), RatVec::unit(3, 2)]);
        assert_eq!(c.indices_on(&plane), OnFlat::Some(vec![2]));
        let far = AffineFlat::new(RatVec::from_ints(&[0, 0, 0]), &[RatVec::unit(3, 0), RatVec::unit(3, 1)]);
        assert_eq!(c.indices_on(&far), OnFlat::Some(vec![]));
        assert_eq!(c.index_of(&RatVec::from_ints(&[3, 9, -1])), Some(3));
        assert_eq!(c.weight(2).as_rational(), Some(Rat::new(1.into(), 4.into())));
    }
}
