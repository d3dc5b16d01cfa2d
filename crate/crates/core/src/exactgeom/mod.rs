//! Exact rational geometry: vectors, flats, LP, polyhedra and face lattices.

pub mod dd;
pub mod flat;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod poly;
pub mod rat;

pub use flat::{affine_hull, AffineFlat};
pub use lattice::{exposed_face, exposing_cone, face_containing, face_lattice, ExposingCone, FaceLattice, PolyFace};
pub use poly::{hull_polyhedron, Equality, Generators, HPolyhedron, Inequality, RelInterior};
pub use rat::{int, parse_rat, rat, Rat, RatVec};
