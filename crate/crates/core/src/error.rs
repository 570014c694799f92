use thiserror::Error;

use crate::mpfloat::Prec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ulp is undefined for zero")]
    UndefinedUlp,

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision must be at least one bit")]
    InvalidPrecision,

    #[error("invalid interval: lower endpoint exceeds upper endpoint")]
    InvalidInterval,

    #[error("enclosure does not meet the domain")]
    DomainDeparture,

    #[error("value {0} lies outside the domain")]
    OutsideDomain(String),

    #[error("Wilkinson estimate requires K <= 0.1 * 2^m (K = {ops}, m = {prec})")]
    WilkinsonPrecondition { ops: u64, prec: Prec },

    #[error("argument must be strictly positive")]
    NonPositive,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no halt within precision cap of {cap} bits ({detail})")]
    NoHaltWithinCap { cap: Prec, detail: String },

    #[error("this form needs a Lyapunov estimate for its analytic band")]
    MissingLyapunov,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
