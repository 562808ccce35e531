use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("substitution has no image for coordinate `{0}`")]
    MissingImage(String),
    #[error("no value assigned to even coordinate `{0}`")]
    MissingAssignment(String),
    #[error("{0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("odd endomorphism is not an involution")]
    NotInvolution,
    #[error("chart has dimension {even}|{odd}, expected n|n")]
    NonSquare { even: usize, odd: usize },
    #[error("connections do not share the same odd endomorphism")]
    DifferentRho,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid coordinate change: {0}")]
    InvalidChange(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("catalog validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
