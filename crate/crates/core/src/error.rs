use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("eigensolver: {0}")]
    Eigen(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
