use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("vector not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("matrix is not hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("not a projector: {0}")]
    NotProjector(String),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("frame function value {value} outside [0, 1]")]
    EvaluationRange { value: f64 },
    #[error("no tabulated direction within {tolerance:e} (nearest at {distance:e})")]
    NoTableEntry { distance: f64, tolerance: f64 },
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("vector is at the pole")]
    AtPole,
    #[error("vector is on the equator")]
    AtEquator,
    #[error("vector is off the descent by {0:e}")]
    NotOnDescent(f64),
    #[error("chain needs {needed} steps, budget is {max_len}")]
    ChainTooLong { needed: usize, max_len: usize },
    #[error("monotonicity violated at step {step}: f went from {before} to {after}")]
    MonotonicityViolation { step: usize, before: f64, after: f64 },
    #[error("off grid: {0}")]
    OffGrid(String),
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("sector {index} has probability {probability:e}")]
    ZeroProbabilitySector { index: usize, probability: f64 },
    #[error("index {index} out of range for {len} outcomes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
