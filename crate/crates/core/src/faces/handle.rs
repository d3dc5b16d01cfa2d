use crate::exactgeom::flat::AffineFlat;
use crate::exactgeom::rat::RatVec;
use crate::measure::MixedMeasure;

/// A face `F` of the convex core, carried by the restricted measure `mu^{cl F}`
/// and the chain of exposing directions that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceHandle {
    /// Pairwise orthogonal exposing directions, top face first.
    pub chain: Vec<RatVec>,
    pub restricted: MixedMeasure,
    /// `aff(F)`.
    pub flat: AffineFlat,
}

impl FaceHandle {
    /// The whole core.
    pub fn top(mu: &MixedMeasure) -> FaceHandle {
        FaceHandle { chain: Vec::new(), restricted: mu.clone(), flat: mu.affine_hull() }
    }

    pub fn dim(&self) -> usize {
        self.flat.dim()
    }

    pub fn is_top(&self) -> bool {
        self.chain.is_empty()
    }

    /// `lin(F)` as a flat through the origin.
    pub fn lin(&self) -> AffineFlat {
        AffineFlat { base: RatVec::zeros(self.flat.ambient_dim()), basis: self.flat.basis.clone() }
    }

    /// Face inclusion for faces of the same core: a face is the core cut by its
    /// own affine hull.
    pub fn is_subface_of(&self, other: &FaceHandle) -> bool {
        other.flat.contains_flat(&self.flat)
    }

    /// Identity of the face as a measure.
    pub fn same_face(&self, other: &FaceHandle) -> bool {
        self.restricted == other.restricted
    }
}
