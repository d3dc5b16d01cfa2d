//! The exponential family generated by a measure.

pub mod eval;
pub mod domain;
pub mod param;
pub mod member;
pub mod divergence;
