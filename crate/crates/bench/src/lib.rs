//! Timing harness for FlipHash and JumpHash, and the `fliphash` command-line driver.
//!
//! ```
//! use fliphash_bench::{bench, Algorithm, BenchConfig};
//! use fliphash_core::ResourceCount;
//!
//! let config = BenchConfig {
//!     algorithms: vec![Algorithm::FlipHash],
//!     n_values: vec![ResourceCount::new(100).unwrap()],
//!     keys_per_point: 10_000,
//!     ..BenchConfig::default()
//! };
//! let rows = bench(&config).unwrap();
//! assert!(rows[0].p10_ns <= rows[0].p90_ns);
//! ```

mod algorithm;
pub mod cli;
mod error;
pub mod output;
pub mod shape;
mod timing;

pub use algorithm::{Algorithm, AnyHasher};
pub use error::{BenchError, Result};
pub use timing::{
    bench, clock_resolution, pin_to_current_cpu, sawtooth_scan, BenchConfig, BenchRow,
    MAX_SAWTOOTH_SPAN, MIN_BATCHES, MIN_BATCH_SIZE, MIN_KEYS_PER_POINT,
};
