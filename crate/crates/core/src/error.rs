use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameter: {0}")]
    InvalidField(String),
    #[error("zero ideal")]
    ZeroIdeal,
    #[error("zero vector")]
    ZeroVector,
    #[error("singular matrix")]
    Singular,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("vector {0} is not in the lattice")]
    NotInLattice(String),
    #[error("not a facet of the domain: {0}")]
    NotAFacet(String),
    #[error("minimal vectors do not span the space (T_C singular)")]
    NotWellRounded,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
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
