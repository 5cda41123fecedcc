//! Statistical and property checks for range hashes: regularity, monotone
//! remapping and independence across seeds and ranges.

mod histogram;
mod independence;
mod remap;
mod uniformity;

pub use histogram::{build_histogram, Histogram, MAX_BUCKETS};
pub use independence::{
    chi_squared_independence, independence_check, remap_spread, ContingencyTable, IndependenceAxis,
    IndependenceOutcome, RemapSpread, MIN_EXPECTED_COUNT,
};
pub use remap::{remap, scan_monotonicity, RemapReport};
pub use uniformity::{
    chi_squared_quantile, chi_squared_survival, uniformity, UniformityReport, SIGNIFICANCE,
};
