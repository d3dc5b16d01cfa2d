//! Components `E^F` of the extension and the smallest face carrying a p.m.

use crate::error::{Error, Result};
use crate::exactgeom::poly::{HPolyhedron, Inequality};
use crate::exactgeom::rat::RatVec;
use crate::expfam::domain::{domain, PieceText};
use crate::expfam::member::FamilyMember;
use crate::faces::{enumerate_faces, minimal_face_containing, FaceHandle};
use crate::measure::MixedMeasure;

/// One component `E^F`.
#[derive(Clone, Debug)]
pub struct Component {
    pub face: FaceHandle,
    /// `Theta_F = dom(Lambda_F) ∩ lin(F)` as semi-open pieces.
    pub theta_f: Vec<HPolyhedron>,
    /// Whether `pi_F(Theta) = Theta_F`.
    pub exhausted_by_projection: bool,
}

impl Component {
    pub fn describe(&self) -> Vec<PieceText> {
        self.theta_f.iter().map(PieceText::of).collect()
    }
}

/// `Theta_F` for a face.
pub fn face_parameters(face: &FaceHandle) -> Result<Vec<HPolyhedron>> {
    let on_lin = HPolyhedron::from_flat(&face.lin());
    let mut out = Vec::new();
    for p in domain(&face.restricted).pieces()? {
        let q = p.intersect(&on_lin);
        if !q.is_empty() {
            out.push(q.canonical()?);
        }
    }
    Ok(out)
}

/// Pieces of `p` outside every piece of `holes`.
fn difference(p: &HPolyhedron, holes: &[HPolyhedron]) -> Vec<HPolyhedron> {
    let mut rest = vec![p.clone()];
    for q in holes {
        let mut next = Vec::new();
        for r in &rest {
            let mut outside = Vec::new();
            for i in &q.inequalities {
                // not (n.x <= b) is (-n).x < -b, and vice versa
                outside.push(Inequality { normal: i.normal.neg(), offset: -i.offset.clone(), strict: !i.strict });
            }
            for e in &q.equalities {
                outside.push(Inequality::strict(e.normal.clone(), e.offset.clone()));
                outside.push(Inequality::strict(e.normal.neg(), -e.offset.clone()));
            }
            for c in outside {
                let mut piece = r.clone();
                piece.inequalities.push(c);
                if !piece.is_empty() {
                    next.push(piece);
                }
            }
        }
        rest = next;
        if rest.is_empty() {
            break;
        }
    }
    rest
}

fn component(face: FaceHandle, projected_theta: &[HPolyhedron]) -> Result<Component> {
    let theta_f = face_parameters(&face)?;
    let mut exhausted = true;
    for p in &theta_f {
        if !difference(p, projected_theta).is_empty() {
            exhausted = false;
            break;
        }
    }
    Ok(Component { face, theta_f, exhausted_by_projection: exhausted })
}

/// Components for the given faces (any measure).
pub fn extension_catalog_for(mu: &MixedMeasure, faces: Vec<FaceHandle>) -> Result<Vec<Component>> {
    let on_lin_mu = HPolyhedron::from_flat(&mu.lin());
    let theta: Vec<HPolyhedron> = domain(mu).pieces()?.into_iter().map(|p| p.intersect(&on_lin_mu)).collect();
    let mut out = Vec::with_capacity(faces.len());
    for f in faces {
        let projected = theta
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| p.fm_project(&f.lin()))
            .collect::<Result<Vec<_>>>()?;
        out.push(component(f, &projected)?);
    }
    Ok(out)
}

/// All components of `ext(E)`; needs a polyhedral support.
pub fn extension_catalog(mu: &MixedMeasure) -> Result<Vec<Component>> {
    extension_catalog_for(mu, enumerate_faces(mu)?)
}

/// What a p.m. dominated by the measure is given as.
#[derive(Clone, Debug)]
pub enum Dominated<'a> {
    Member(&'a FamilyMember),
    /// Atoms carrying positive probability.
    Support(&'a [RatVec]),
}

/// The smallest face whose closure has full mass.
pub fn minimal_dominated_face(mu: &MixedMeasure, p: Dominated<'_>) -> Result<FaceHandle> {
    match p {
        Dominated::Member(m) => {
            let top = FaceHandle::top(mu);
            if m.face.restricted.dim != mu.dim || !m.face.is_subface_of(&top) {
                return Err(Error::NotDominated);
            }
            let f = &m.face;
            if f.restricted.atoms.iter().any(|a| mu.weight_at(&a.point).is_none()) {
                return Err(Error::NotDominated);
            }
            // every atom of F carries positive probability, so F itself is minimal
            Ok(f.clone())
        }
        Dominated::Support(xs) => minimal_face_containing(mu, xs),
    }
}
