//! Closure decisions, witness constructions and sequence diagnostics.

pub mod catalog;
pub mod classify;
pub mod inequalities;
pub mod neat;
pub mod suites;
pub mod verdict;

pub use catalog::{extension_catalog, extension_catalog_for, minimal_dominated_face, Component, Dominated};
pub use classify::{classify_sequence, ext_sequence_analysis, Alternative, Diagnostics, ExtReport, LimitMember, SequenceReport};
pub use inequalities::{inequality_suite, pinsker_check, rho, BoundProbe, Check, InequalityReport, Tally};
pub use neat::{neat_sequence, witness_sequence, NeatPlan, NeatStep, WitnessEntry, WitnessSequence};
pub use suites::{default_probe, run_suite, SuiteConfig, SuiteReport, SUITES};
pub use verdict::{
    in_i_closure, in_ri_closure, in_variation_closure, variation_closure, ClosureComponent, ClosureKind, ClosureRefutation,
    ClosureVerdict, ClosureWitness, Decision, FailingCondition, RiExtras,
};
