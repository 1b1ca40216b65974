use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("mismatched field parameters")]
    FieldMismatch,
    #[error("element is not a unit")]
    NonUnit,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition defect: {0}")]
    PreconditionDefect(String),
    #[error("indeterminate at working precision: {0}")]
    IndeterminateAtPrecision(String),
    #[error("repeated eigenvalue: a_p^2 = 4 p^(k-1)")]
    RepeatedEigenvalue,
    #[error("radius violation: {0}")]
    RadiusViolation(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no seed found: {0}")]
    SeedNotFound(String),
    #[error("not etale: {0}")]
    NotEtale(String),
    #[error("catalog build failure: {0}")]
    CatalogBuildFailure(String),
    #[error("no catalog match: {0}")]
    NoMatch(String),
    #[error("ambiguous catalog match: {0}")]
    AmbiguousMatch(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
