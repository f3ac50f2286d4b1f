use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate equation: A2*A-2 = 0 (A2 = {a2}, A-2 = {am2})")]
    DegenerateEquation { a2: String, am2: String },

    #[error("point map is singular at t = {0}")]
    MapSingularity(String),

    #[error("gamma function has a pole at {0}")]
    PoleOfGamma(String),

    #[error("singular matrix: pivot {pivot:e} in column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("step size underflow at theta = {theta} (h = {step:e})")]
    StepUnderflow { theta: f64, step: f64 },

    #[error("logarithmic case: circuit matrix has a repeated eigenvalue (|disc| = {disc:e})")]
    LogarithmicCase { disc: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },

    #[error("central coefficient c0 vanishes (|c0| = {c0:e}, max |c| = {max:e})")]
    ZeroCentralCoefficient { c0: f64, max: f64 },

    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("coefficient ratio chain broke down at m = {0}")]
    RatioBreakdown(usize),

    #[error("asymptotic series has no decreasing term at z = {0}")]
    NoDecreasingTerm(String),

    #[error("arg z = {arg_z} lies on a Stokes ray but off-ray evaluation was requested")]
    AmbiguousBranch { arg_z: f64 },

    #[error("|arg xi| >= pi for xi = {0}")]
    BranchViolation(String),

    #[error("Wronskian is not n-independent (spread {spread:e} at n = {n})")]
    InconsistentWronskian { n: i64, spread: f64 },

    #[error("no regular combination: the origin connection matrix is singular")]
    NoRegularSelection,

    #[error("no root in interval [{lo}, {hi}]")]
    NoRootInInterval { lo: f64, hi: f64 },

    #[error("matching system at z = 1 is singular")]
    SingularMatch,

    #[error("Taylor series did not converge by order {0}")]
    SeriesNotConverged(usize),

    #[error("inputs belong to different parameter sets")]
    ParameterMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
