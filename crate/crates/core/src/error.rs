use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("eigenvalue iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("root finder failed for polynomial {0}")]
    RootFinding(String),
    #[error("classification failed: {0}")]
    Classification(String),
    #[error("degenerate Newton diagram: {0}")]
    DegenerateDiagram(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unresolved transition: {0}")]
    Unresolved(String),
    #[error("at {param} = {value}: {source}")]
    AtGridPoint {
        param: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from bad input rather than a numerical failure.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidInput(_) | Error::Parse(_) => true,
            Error::AtGridPoint { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
