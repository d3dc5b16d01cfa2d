use num_traits::Zero;

use super::linalg;
use super::rat::{Rat, RatVec};
use crate::error::{Error, Result};

/// An affine flat `base + span(basis)`, basis kept in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineFlat {
    pub base: RatVec,
    pub basis: Vec<RatVec>,
}

impl AffineFlat {
    pub fn new(base: RatVec, directions: &[RatVec]) -> Self {
        let d = base.dim();
        let basis = linalg::span_basis(directions, d);
        AffineFlat { base, basis }
    }

    pub fn point(p: RatVec) -> Self {
        AffineFlat { base: p, basis: Vec::new() }
    }

    pub fn whole(d: usize) -> Self {
        let basis = (0..d).map(|i| RatVec::unit(d, i)).collect();
        AffineFlat { base: RatVec::zeros(d), basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Normals of the orthogonal complement of `lin`.
    pub fn normals(&self) -> Vec<RatVec> {
        linalg::orth_complement(&self.basis, self.ambient_dim())
    }

    pub fn contains(&self, x: &RatVec) -> bool {
        let diff = x.sub(&self.base);
        self.normals().iter().all(|n| n.dot(&diff).is_zero())
    }

    pub fn lin_contains(&self, v: &RatVec) -> bool {
        self.normals().iter().all(|n| n.dot(v).is_zero())
    }

    /// Orthogonal projection onto `lin(self)`.
    pub fn project(&self, v: &RatVec) -> RatVec {
        linalg::project_onto_span(v, &self.basis)
    }

    pub fn contains_flat(&self, other: &AffineFlat) -> bool {
        self.contains(&other.base) && other.basis.iter().all(|b| self.lin_contains(b))
    }

    /// Intersection with the hyperplane `<normal, x> = offset`; `None` if disjoint.
    pub fn intersect_hyperplane(&self, normal: &RatVec, offset: &Rat) -> Option<AffineFlat> {
        let mut rows: Vec<RatVec> = self.normals();
        let mut rhs: Vec<Rat> = rows.iter().map(|n| n.dot(&self.base)).collect();
        rows.push(normal.clone());
        rhs.push(offset.clone());
        let (x, ns) = linalg::solve_affine(&rows, &rhs, self.ambient_dim())?;
        Some(AffineFlat::new(x, &ns))
    }

    /// Coordinates of `x - base` in the basis (requires `x` in the flat).
    pub fn coords(&self, x: &RatVec) -> Option<Vec<Rat>> {
        linalg::solve_combination(&self.basis, &x.sub(&self.base))
    }
}

/// Smallest affine flat containing the points and closed under the rays.
pub fn affine_hull(points: &[RatVec], rays: &[RatVec]) -> Result<AffineFlat> {
    let Some(p0) = points.first() else {
        return Err(Error::EmptyInput);
    };
    let mut dirs: Vec<RatVec> = points[1..].iter().map(|p| p.sub(p0)).collect();
    dirs.extend(rays.iter().cloned());
    Ok(AffineFlat::new(p0.clone(), &dirs))
}
