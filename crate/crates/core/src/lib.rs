//! Consistent range-hashing: map 64-bit keys to `[0, n)` so that changing `n`
//! only moves keys onto an added resource or off a removed one.
//!
//! [`FlipHasher`] evaluates in constant time on average, with a worst case
//! bounded by its retry bound. [`JumpHasher`] is the logarithmic-time
//! baseline. [`statlab`] holds the regularity, monotonicity and independence
//! checks run against both.
//!
//! ```
//! use fliphash_core::{FlipHasher, ResourceCount};
//!
//! let hasher = FlipHasher::new();
//! let n = ResourceCount::new(17)?;
//! let before = hasher.hash(10427592028180905159, n);
//! let after = hasher.hash(10427592028180905159, ResourceCount::new(18)?);
//! assert!(before < 17);
//! assert!(after == before || after == 17);
//! # Ok::<(), fliphash_core::Error>(())
//! ```

mod error;
pub mod fliphash;
pub mod hash_family;
pub mod jump;
pub mod keys;
pub mod statlab;

pub use error::{Error, Result};
pub use fliphash::{FlipHasher, FlipTrace, Pow2Trace, RangeExponent, ResourceCount, ReturnPath};
pub use hash_family::{
    mix, sigma, BitMixer, HashFamily, SigmaElement, SigmaPair, StubFamily, DEFAULT_MAX_RETRIES,
};
pub use jump::JumpHasher;
pub use keys::KeyStream;

/// A function from keys to `[0, n)` for any resource count `n`.
pub trait RangeHash {
    fn hash_range(&self, key: u64, n: ResourceCount) -> u64;
}

impl<F: Fn(u64, ResourceCount) -> u64> RangeHash for F {
    #[inline(always)]
    fn hash_range(&self, key: u64, n: ResourceCount) -> u64 {
        self(key, n)
    }
}

/// A seeded hash that can be rebuilt with another seed.
pub trait Reseed {
    fn reseeded(&self, seed: u64) -> Self;
}
