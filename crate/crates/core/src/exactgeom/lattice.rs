//! Face lattices, exposed faces and exposing cones of closed polyhedra.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};

use super::flat::{affine_hull, AffineFlat};
use super::lp::{self, LpOutcome, Row};
use super::poly::{hull_from_generators, Generators, HPolyhedron, Inequality, DEFAULT_MAX_DIM};
use super::rat::{Rat, RatVec};
use crate::error::{Error, Result};

/// A nonempty face, identified by the canonical inequalities tight on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFace {
    pub tight: Vec<usize>,
    pub points: Vec<RatVec>,
    pub rays: Vec<RatVec>,
    pub lines: Vec<RatVec>,
}

impl PolyFace {
    pub fn flat(&self) -> AffineFlat {
        let mut dirs = self.rays.clone();
        dirs.extend(self.lines.iter().cloned());
        affine_hull(&self.points, &dirs).expect("faces are nonempty")
    }

    pub fn dim(&self) -> usize {
        self.flat().dim()
    }

    pub fn generators(&self) -> Generators {
        Generators { points: self.points.clone(), rays: self.rays.clone(), lines: self.lines.clone() }
    }

    /// `self` is contained in `other` (both from the same polyhedron).
    pub fn is_subface_of(&self, other: &PolyFace) -> bool {
        other.tight.iter().all(|i| self.tight.contains(i))
    }

    /// H-form of the face inside the canonical polyhedron `canon`.
    pub fn polyhedron(&self, canon: &HPolyhedron) -> HPolyhedron {
        let mut p = canon.closed();
        for &i in &self.tight {
            let ineq = &canon.inequalities[i];
            p.equalities.push(super::poly::Equality::new(ineq.normal.clone(), ineq.offset.clone()));
        }
        p
    }
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub canon: HPolyhedron,
    pub gens: Generators,
    /// Ordered by decreasing dimension, then tight set.
    pub faces: Vec<PolyFace>,
}

impl FaceLattice {
    pub fn top(&self) -> &PolyFace {
        &self.faces[0]
    }

    pub fn find(&self, tight: &[usize]) -> Option<usize> {
        self.faces.iter().position(|f| f.tight == tight)
    }

    /// Indices of faces strictly contained in `faces[i]`.
    pub fn below(&self, i: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&j| j != i && self.faces[j].is_subface_of(&self.faces[i]))
            .collect()
    }
}

fn incident(canon: &HPolyhedron, gens: &Generators, tight: &BTreeSet<usize>) -> PolyFace {
    let on = |i: usize, x: &RatVec, point: bool| {
        let ineq = &canon.inequalities[i];
        let v = ineq.normal.dot(x);
        if point {
            v == ineq.offset
        } else {
            v.is_zero()
        }
    };
    PolyFace {
        tight: tight.iter().copied().collect(),
        points: gens.points.iter().filter(|p| tight.iter().all(|&i| on(i, p, true))).cloned().collect(),
        rays: gens.rays.iter().filter(|r| tight.iter().all(|&i| on(i, r, false))).cloned().collect(),
        lines: gens.lines.clone(),
    }
}

/// Smallest face whose tight set contains `seed`; `None` if that face is empty.
fn close(canon: &HPolyhedron, gens: &Generators, seed: &BTreeSet<usize>) -> Option<PolyFace> {
    let f = incident(canon, gens, seed);
    if f.points.is_empty() {
        return None;
    }
    let tight: BTreeSet<usize> = (0..canon.inequalities.len())
        .filter(|&i| {
            let ineq = &canon.inequalities[i];
            f.points.iter().all(|p| ineq.normal.dot(p) == ineq.offset)
                && f.rays.iter().all(|r| ineq.normal.dot(r).is_zero())
        })
        .collect();
    Some(incident(canon, gens, &tight))
}

/// The face of the canonical polyhedron having `x` in its relative interior.
pub fn face_containing(canon: &HPolyhedron, gens: &Generators, x: &RatVec) -> Option<PolyFace> {
    if !canon.contains_closed(x) {
        return None;
    }
    let tight: BTreeSet<usize> = (0..canon.inequalities.len())
        .filter(|&i| canon.inequalities[i].normal.dot(x) == canon.inequalities[i].offset)
        .collect();
    close(canon, gens, &tight)
}

pub fn face_lattice(p: &HPolyhedron) -> Result<FaceLattice> {
    face_lattice_capped(p, DEFAULT_MAX_DIM)
}

pub fn face_lattice_capped(p: &HPolyhedron, max_dim: usize) -> Result<FaceLattice> {
    if p.dim > max_dim {
        return Err(Error::DimensionTooLarge { got: p.dim, max: max_dim });
    }
    let canon = p.closed().canonical()?;
    let gens = canon.generators()?;
    let top = close(&canon, &gens, &BTreeSet::new()).expect("nonempty");
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut faces = Vec::new();
    let mut queue = VecDeque::from([top]);
    while let Some(f) = queue.pop_front() {
        if !seen.insert(f.tight.clone()) {
            continue;
        }
        for i in 0..canon.inequalities.len() {
            if f.tight.contains(&i) {
                continue;
            }
            let mut t: BTreeSet<usize> = f.tight.iter().copied().collect();
            t.insert(i);
            if let Some(g) = close(&canon, &gens, &t) {
                if !seen.contains(&g.tight) {
                    queue.push_back(g);
                }
            }
        }
        faces.push(f);
    }
    faces.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.tight.cmp(&b.tight)));
    Ok(FaceLattice { canon, gens, faces })
}

/// The face of `p` maximizing `<tau, .>`.
pub fn exposed_face(p: &HPolyhedron, tau: &RatVec) -> Result<PolyFace> {
    let canon = p.closed().canonical()?;
    let gens = canon.generators()?;
    exposed_face_in(&canon, &gens, tau)
}

pub fn exposed_face_in(canon: &HPolyhedron, gens: &Generators, tau: &RatVec) -> Result<PolyFace> {
    if gens.lines.iter().any(|l| !tau.dot(l).is_zero()) || gens.rays.iter().any(|r| tau.dot(r).is_positive()) {
        return Err(Error::Unbounded);
    }
    let best = gens.points.iter().map(|x| tau.dot(x)).max().expect("nonempty");
    let sub = Generators {
        points: gens.points.iter().filter(|x| tau.dot(x) == best).cloned().collect(),
        rays: gens.rays.iter().filter(|r| tau.dot(r).is_zero()).cloned().collect(),
        lines: gens.lines.clone(),
    };
    let tight: BTreeSet<usize> = (0..canon.inequalities.len())
        .filter(|&i| {
            let ineq = &canon.inequalities[i];
            sub.points.iter().all(|x| ineq.normal.dot(x) == ineq.offset)
                && sub.rays.iter().all(|r| ineq.normal.dot(r).is_zero())
        })
        .collect();
    Ok(incident(canon, gens, &tight))
}

/// Relatively open cone of directions exposing a face: strictly positive
/// combinations of the tight facet normals plus `lin(P)^perp`.
#[derive(Clone, Debug)]
pub struct ExposingCone {
    pub dim: usize,
    pub normals: Vec<RatVec>,
    pub lineality: Vec<RatVec>,
}

impl ExposingCone {
    pub fn contains(&self, tau: &RatVec) -> bool {
        if tau.is_zero() {
            return false;
        }
        // tau = sum l_i a_i + sum m_j n_j with l_i >= s, maximize s (s <= 1)
        let nl = self.normals.len();
        let nm = self.lineality.len();
        let nvar = nl + nm + 1;
        let mut eqs: Vec<Row> = Vec::new();
        for c in 0..self.dim {
            let mut row = vec![Rat::zero(); nvar];
            for (i, a) in self.normals.iter().enumerate() {
                row[i] = a[c].clone();
            }
            for (j, n) in self.lineality.iter().enumerate() {
                row[nl + j] = n[c].clone();
            }
            eqs.push((RatVec(row), tau[c].clone()));
        }
        let mut ineqs: Vec<Row> = Vec::new();
        for i in 0..nl {
            let mut row = RatVec::zeros(nvar);
            row[i] = -Rat::one();
            row[nvar - 1] = Rat::one();
            ineqs.push((row, Rat::zero()));
        }
        ineqs.push((RatVec::unit(nvar, nvar - 1), Rat::one()));
        match lp::maximize(nvar, &ineqs, &eqs, &RatVec::unit(nvar, nvar - 1)) {
            LpOutcome::Optimal { value, .. } => nl == 0 || value.is_positive(),
            _ => false,
        }
    }

    /// H-form with every inequality strict.
    pub fn h_form(&self) -> Result<HPolyhedron> {
        let g = Generators {
            points: vec![RatVec::zeros(self.dim)],
            rays: self.normals.clone(),
            lines: self.lineality.clone(),
        };
        let mut h = hull_from_generators(&g)?;
        for i in &mut h.inequalities {
            *i = Inequality::strict(i.normal.clone(), i.offset.clone());
        }
        Ok(h)
    }

    /// A rational member.
    pub fn witness(&self) -> RatVec {
        let mut t = RatVec::zeros(self.dim);
        for a in &self.normals {
            t = t.add(a);
        }
        if t.is_zero() {
            if let Some(n) = self.lineality.first() {
                t = n.clone();
            }
        }
        t
    }
}

pub fn exposing_cone(canon: &HPolyhedron, face: &PolyFace) -> ExposingCone {
    ExposingCone {
        dim: canon.dim,
        normals: face.tight.iter().map(|&i| canon.inequalities[i].normal.clone()).collect(),
        lineality: canon.equalities.iter().map(|e| e.normal.clone()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::poly::hull_polyhedron;

    fn tri() -> HPolyhedron {
        hull_polyhedron(
            &[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn triangle_lattice() {
        let l = face_lattice(&tri()).unwrap();
        assert_eq!(l.faces.len(), 7);
        assert_eq!(l.faces[0].dim(), 2);
        assert_eq!(l.faces.iter().filter(|f| f.dim() == 0).count(), 3);
    }

    #[test]
    fn square_pyramid_lattice() {
        let pts: Vec<RatVec> = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]
            .iter()
            .map(|p| RatVec::from_ints(p))
            .chain(std::iter::once(RatVec::from_rats(&[(1, 2), (1, 2), (1, 1)])))
            .collect();
        let l = face_lattice(&hull_polyhedron(&pts, &[]).unwrap()).unwrap();
        // 5 vertices, 8 edges, 5 facets, the pyramid
        assert_eq!(l.faces.len(), 19);
    }

    #[test]
    fn ray_fixture_lattice() {
        let p = hull_polyhedron(
            &[RatVec::from_ints(&[0, 1]), RatVec::from_ints(&[1, 0])],
            &[RatVec::from_ints(&[1, 0])],
        )
        .unwrap();
        let l = face_lattice(&p).unwrap();
        // the closed hull also has the edge {x2 = 1}, which carries one atom only
        assert_eq!(l.faces.len(), 6);
        assert_eq!(l.faces.iter().filter(|f| f.dim() == 0).count(), 2);
    }

    #[test]
    fn exposed_and_exposing() {
        let t = tri();
        let f = exposed_face(&t, &RatVec::from_ints(&[1, 1])).unwrap();
        assert_eq!(f.dim(), 1);
        let l = face_lattice(&t).unwrap();
        let cone = exposing_cone(&l.canon, &f);
        assert!(cone.contains(&RatVec::from_ints(&[1, 1])));
        assert!(!cone.contains(&RatVec::from_ints(&[1, 0])));
        assert!(!cone.contains(&RatVec::zeros(2)));
        let top = exposing_cone(&l.canon, l.top());
        assert!(!top.contains(&RatVec::from_ints(&[1, 0])));

        let p = hull_polyhedron(&[RatVec::from_ints(&[0, 0])], &[RatVec::from_ints(&[1, 0])]).unwrap();
        assert_eq!(exposed_face(&p, &RatVec::from_ints(&[1, 0])), Err(Error::Unbounded));
    }
}
