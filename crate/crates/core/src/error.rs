use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("resource count must be at least 1")]
    ZeroResources,

    #[error("range exponent {0} exceeds 64")]
    RangeExponentTooLarge(u32),

    #[error("bit position {0} is outside 0..=63")]
    BitPositionOutOfRange(u32),

    #[error("retry index {index} exceeds the retry bound {bound}")]
    RetryIndexOutOfRange { index: u32, bound: u32 },

    #[error("retry bound {0} must lie in 1..=65535")]
    InvalidRetryBound(u32),

    #[error("hash of key {key} is {value}, outside [0, {n})")]
    OutputOutOfRange { key: u64, value: u64, n: u64 },

    #[error("no keys supplied")]
    NoKeys,

    #[error("histogram has no recorded samples")]
    EmptyHistogram,

    #[error("histograms of {left} and {right} buckets cannot be merged")]
    HistogramShapeMismatch { left: usize, right: usize },

    #[error("{n} buckets is too many to tabulate (limit {limit})")]
    TooManyBuckets { n: u64, limit: u64 },

    #[error("scan range requires 1 <= n_min < n_max, got {n_min}..{n_max}")]
    InvalidScanRange { n_min: u64, n_max: u64 },

    #[error("invalid independence parameters: {0}")]
    InvalidAxis(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
