use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("empty span")]
    EmptySpan,

    #[error("zero complement")]
    ZeroComplement,

    #[error("coincident rays")]
    CoincidentRays,

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("duplicate source ray at table index {0}")]
    DuplicateSource(usize),

    #[error("missing ray: {0}")]
    MissingRay(String),

    #[error("not orthogonality preserving: {0}")]
    NotOrthogonalityPreserving(String),

    #[error("not induced by an isometry: {0}")]
    NotInducedByIsometry(String),

    #[error(
        "table inconsistent with any isometry: residual {residual:.3e} at table index {worst}"
    )]
    TableInconsistent { residual: f64, worst: usize },

    #[error("rank instability: {0}")]
    RankInstability(String),

    #[error("tolerance breakdown: {0}")]
    ToleranceBreakdown(String),

    #[error("f does not map this star into a star: {0}")]
    StarDescent(String),

    #[error("oracle has no entry for the queried subspace")]
    OracleMiss,

    #[error("partial assignment: ray {0} has no value")]
    PartialAssignment(usize),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
