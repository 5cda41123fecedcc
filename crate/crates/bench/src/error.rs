use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Contract(#[from] fliphash_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(
        "clock resolution {resolution_ns} ns is too coarse for batches of {batch_size} evaluations; \
         use a batch size of at least {suggested}"
    )]
    ClockTooCoarse {
        resolution_ns: u64,
        batch_size: usize,
        suggested: usize,
    },
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Whether the failure came from reading or writing, rather than from the request.
    pub fn is_io(&self) -> bool {
        match self {
            BenchError::Io(_) => true,
            BenchError::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            BenchError::Json(e) => e.is_io(),
            _ => false,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
