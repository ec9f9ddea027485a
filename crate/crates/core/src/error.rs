use thiserror::Error;

/// Errors produced while loading instances, generating them, or solving games.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed instance document: {0}")]
    MalformedDocument(String),

    #[error("graph is not connected")]
    DisconnectedGraph,

    /// Carries the vertex id of the offending target.
    #[error("signal probabilities of target at vertex {0} do not sum to 1")]
    ProbabilityNotNormalized(usize),

    #[error("signal `{0}` covers no target")]
    EmptySignalCoverage(String),

    #[error("unknown signal index {0}")]
    SignalUnknown(usize),

    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),

    #[error("signal covers {0} targets; at most 63 are supported")]
    TooManyTargets(usize),

    #[error("instance topology does not match: expected {expected}")]
    WrongTopology { expected: &'static str },

    #[error("start vertex {0} is not the hub of the star")]
    StartNotHub(usize),

    #[error("branch weights sum to an odd total")]
    OddTotalWeight,

    #[error("edge density must lie in (0, 1], got {0}")]
    InvalidDensity(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear program failed: {0}")]
    LpNumericalFailure(String),

    #[error("time limit exceeded")]
    Timeout,

    #[error("robustness bound undefined: best placement has value 1")]
    Undefined,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
