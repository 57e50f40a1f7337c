use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate basis: vectors are linearly dependent")]
    DegenerateBasis,
    #[error("empty basis")]
    EmptyBasis,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("target not in span of the basis")]
    TargetNotInSpan,
    #[error("not a lattice vector")]
    NotALatticeVector,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension {dim} exceeds the desk-scale cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("mass did not converge: {0}")]
    MassDidNotConverge(String),
    #[error("enumeration exceeded its node budget")]
    EnumerationBudget,
    #[error("parameter too small for Klein: s = {s}, need at least {required}")]
    KleinParameterTooSmall { s: f64, required: f64 },
    #[error("radius too small: r = {r}, need at least {required}")]
    RadiusTooSmall { r: f64, required: f64 },
    #[error("insufficient input: {got} samples, strict sizing needs {required}")]
    InsufficientInput { got: usize, required: u128 },
    #[error("pipeline starved: {got} samples out, expected at least {expected}")]
    PipelineStarved { got: usize, expected: f64 },
    #[error("solver starved: no samples")]
    SolverStarved,
    #[error("parameter s = {s} is below dist/f = {bound}")]
    BelowSmoothing { s: f64, bound: f64 },
    #[error("no ladder stage count up to {max} reaches s = {s}")]
    TooManyStages { s: f64, max: usize },
    #[error("ladder violation: no qualifying index")]
    LadderViolation,
    #[error("coset labels differ")]
    LabelMismatch,
    #[error("recursion depth exceeded")]
    RecursionDepth,
    #[error("coefficient overflow")]
    Overflow,
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
