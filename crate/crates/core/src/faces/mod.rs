//! Faces of the convex core, access sequences and accessibility.

mod handle;

pub use handle::FaceHandle;
mod expose;

pub use expose::{enumerate_faces, expose, support_value, verify_access_sequence};
mod access;

pub use access::{accessible_faces, is_accessible, is_adapted, minimal_face_containing, Accessibility, AdaptedReport, Refutation, StepReport};
