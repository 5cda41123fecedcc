use std::fmt;

use fliphash_core::{FlipHasher, JumpHasher, RangeHash, Reseed, ResourceCount};
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, clap::ValueEnum)]
pub enum Algorithm {
    #[serde(rename = "fliphash")]
    #[value(name = "fliphash")]
    FlipHash,
    #[serde(rename = "jumphash")]
    #[value(name = "jumphash")]
    JumpHash,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::FlipHash, Algorithm::JumpHash];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FlipHash => "fliphash",
            Algorithm::JumpHash => "jumphash",
        }
    }

    /// Builds the hasher. `max_retries` only applies to FlipHash.
    pub fn hasher(self, seed: u64, max_retries: u32) -> Result<AnyHasher> {
        Ok(match self {
            Algorithm::FlipHash => {
                AnyHasher::Flip(FlipHasher::with_seed(seed).with_max_retries(max_retries)?)
            }
            Algorithm::JumpHash => AnyHasher::Jump(JumpHasher::with_seed(seed)),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Either hasher behind one type, for the statistical drivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyHasher {
    Flip(FlipHasher),
    Jump(JumpHasher),
}

impl RangeHash for AnyHasher {
    fn hash_range(&self, key: u64, n: ResourceCount) -> u64 {
        match self {
            AnyHasher::Flip(h) => h.hash(key, n),
            AnyHasher::Jump(h) => h.hash(key, n),
        }
    }
}

impl Reseed for AnyHasher {
    fn reseeded(&self, seed: u64) -> Self {
        match self {
            AnyHasher::Flip(h) => AnyHasher::Flip(h.reseeded(seed)),
            AnyHasher::Jump(h) => AnyHasher::Jump(h.reseeded(seed)),
        }
    }
}
