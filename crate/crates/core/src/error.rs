use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown graph family `{0}`")]
    UnknownGraph(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("n*d = {n}*{d} is odd; no {d}-regular graph on {n} vertices")]
    OddDegreeSum { n: usize, d: usize },

    #[error("rejection budget exhausted after {attempts} attempts")]
    RejectionBudget { attempts: usize },

    #[error("isolated vertices have no random-walk transitions: {0:?}")]
    IsolatedVertices(Vec<usize>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("chain is periodic (bipartite component); total variation does not converge")]
    Periodic,

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("support violation at ({x}, {y}): first kernel is positive where the second is zero")]
    SupportViolation { x: usize, y: usize },

    #[error("invalid state set: {0}")]
    InvalidSet(String),

    #[error("state {0} is not in the set")]
    NotInSet(usize),

    #[error("sphere of radius {k} around vertex {v} is empty")]
    EmptySphere { v: usize, k: usize },

    #[error("graph is not regular")]
    NotRegular,

    #[error("kernel is not reversible: {0}")]
    NotReversible(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error at `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("incompatible report version `{found}` (expected `{expected}`)")]
    ReportVersion { found: String, expected: String },

    #[error("{0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
