use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),
    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),
    #[error("numerical quality: {0}")]
    NumericalQuality(String),
    #[error("insufficient statistical power: {0}")]
    StatisticalPower(String),
    #[error("Cholesky failures in {failures} of {draws} draws exceed the 0.01% limit")]
    CholeskyIncidence { failures: u64, draws: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
