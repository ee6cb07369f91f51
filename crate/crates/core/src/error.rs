use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("all rating counts are zero")]
    AllZeroCounts,
    #[error("invalid rating distribution: {0}")]
    InvalidDistribution(&'static str),
    #[error("EMD order must be >= 1, got {0}")]
    InvalidOrder(f64),
    #[error("argument outside the function domain: {0}")]
    DomainError(&'static str),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dip statistic needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("sample must be sorted ascending")]
    UnsortedSample,
    #[error("distribution has no rater count")]
    MissingRaterCount,
    #[error("loss weights must be non-negative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),
    #[error("function value is not finite at evaluation {0}")]
    NonFiniteValue(usize),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("no images recommended")]
    NoRecommendations,
}
