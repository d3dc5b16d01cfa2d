use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension {got} exceeds the configured maximum {max}")]
    DimensionTooLarge { got: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("polyhedron is empty")]
    Empty,
    #[error("linear functional is unbounded above on the set")]
    Unbounded,
    #[error("zero weight on an atom")]
    ZeroWeight,
    #[error("atom family has infinite total mass (rho = 1 requires alpha > 1)")]
    InfiniteMass,
    #[error("atom family collides with a finite atom at index k = {0}")]
    DuplicateAtomInFamily(u64),
    #[error("restriction is empty: no atom lies on the flat")]
    EmptyRestriction,
    #[error("hyperplane does not support the convex support")]
    NotSupporting,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parameter lies outside the domain of the log-partition function")]
    DomainViolation,
    #[error("direction leaves the domain of the log-partition function")]
    DirectionLeavesDomain,
    #[error("precision unreachable: {0}")]
    PrecisionUnreachable(String),
    #[error("zero direction")]
    ZeroDirection,
    #[error("direction is not in the linear span of the face")]
    NotInLin,
    #[error("direction has unbounded supremum over the face")]
    UnboundedDirection,
    #[error("access sequence fails at step {index}: {source}")]
    AccessStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("relative interior of the parameter set misses the domain interior")]
    RelativeBoundaryDegenerate,
    #[error("theta is not in the projected relative interior of the parameter set")]
    ThetaNotInRelativeInterior,
    #[error("measure does not dominate the distribution")]
    NotDominated,
    #[error("face containment violated at index {0}")]
    FaceContainmentViolated(usize),
    #[error("probe out of range: {0}")]
    ProbeOutOfRange(String),
}

impl Error {
    /// CLI exit code: 2 invalid input, 3 unsupported, 4 precision unreachable.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsupported(_) | Error::DimensionTooLarge { .. } => 3,
            Error::PrecisionUnreachable(_) => 4,
            Error::AccessStep { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
