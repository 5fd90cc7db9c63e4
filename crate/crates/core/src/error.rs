use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("resampling probability must lie in (0, 1), got {0}")]
    InvalidMu(f64),
    #[error("bid {bid} is outside the support {support}")]
    OutOfSupport { bid: f64, support: crate::Interval },
    #[error("distribution derivative requires a < b inside the support, got a = {a}, b = {b}")]
    InvalidDerivativeArgs { a: f64, b: f64 },
    #[error("resampling recursion exceeded {0} iterations; the random stream looks broken")]
    RecursionLimit(usize),
    #[error("configuration error: {0}")]
    Config(&'static str),
    #[error("expected {expected} bids, got {got}")]
    BidCount { expected: usize, got: usize },
    #[error("no source-target path exists")]
    Infeasible,
    #[error("edge agent {0} is a source-target cut")]
    CutEdge(usize),
    #[error("integral of the allocation curve diverges below {0}")]
    Divergent(f64),
    #[error("allocation rule returned an invalid allocation for agent {0}")]
    InvalidAllocation(usize),
    #[error("all bids are zero")]
    ZeroBids,
}
