pub mod cli;
pub mod closures;
pub mod error;
pub mod exactgeom;
pub mod expfam;
pub mod faces;
pub mod fixtures;
pub mod interval;
pub mod measure;
pub mod series;

pub use error::{Error, Result};
