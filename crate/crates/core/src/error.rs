use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no such corpus function: {0}")]
    UnknownFunction(String),
    #[error("norm divergent")]
    NormDivergent,
    #[error("nonpositive data in log fit")]
    NonpositiveLogData,
    #[error("node out of domain")]
    NodeOutOfDomain,
    #[error("t out of range: t = {t} exceeds {max}")]
    TOutOfRange { t: f64, max: f64 },
    #[error("endpoint intervals overlap: 2k^2t^2 = {0} >= 1")]
    EndpointIntervalsOverlap(f64),
    #[error("ill-conditioned basis (condition estimate {0:e})")]
    IllConditionedBasis(f64),
    #[error("no admissible competitor")]
    NoAdmissibleCompetitor,
    #[error("out of corollary range: p = {0}")]
    OutOfCorollaryRange(f64),
    #[error("weight exponent {0} is not integrable (must exceed -1)")]
    WeightExponent(f64),
    #[error("difference order {0} not supported (1..=30)")]
    DifferenceOrder(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
