use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow evaluating {what} (order {order}, x = {x})")]
    Overflow { what: &'static str, order: f64, x: f64 },
    #[error("index error: {0}")]
    Index(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("integrand overflow at (r, t) = ({r}, {t})")]
    IntegrandOverflow { r: f64, t: f64 },
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("aliasing: discarded energy fraction {0:e} exceeds threshold")]
    Aliasing(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
