//! The keyed hash family that FlipHash draws from, and the injective map from
//! `(bit position, retry index)` pairs to family seeds.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest bit position accepted by [`sigma`].
pub const MAX_BIT_POSITION: u32 = 63;

/// Largest retry index accepted by [`sigma`]. Both components must stay below
/// `2^16` for `b + i * 2^16` to be injective.
pub const MAX_RETRY_INDEX: u32 = (1 << 16) - 1;

/// Retry bound used when none is configured.
pub const DEFAULT_MAX_RETRIES: u32 = 64;

/// A `(b, i)` pair validated against a retry bound `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SigmaPair {
    bit: u32,
    retry: u32,
}

impl SigmaPair {
    pub fn new(bit: u32, retry: u32, max_retries: u32) -> Result<Self> {
        if bit > MAX_BIT_POSITION {
            return Err(Error::BitPositionOutOfRange(bit));
        }
        let bound = max_retries.min(MAX_RETRY_INDEX);
        if retry > bound {
            return Err(Error::RetryIndexOutOfRange {
                index: retry,
                bound,
            });
        }
        Ok(Self { bit, retry })
    }

    pub fn bit(self) -> u32 {
        self.bit
    }

    pub fn retry(self) -> u32 {
        self.retry
    }

    /// Seeds the pair with `seed`: `(b + i * 2^16) XOR seed`.
    pub const fn element(self, seed: u64) -> SigmaElement {
        sigma_unchecked(self.bit, self.retry, seed)
    }
}

/// A seed of the hash family, as produced by [`sigma`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SigmaElement(u64);

impl SigmaElement {
    pub const fn from_raw(value: u64) -> Self {
        Self(value)
    }

    pub const fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for SigmaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Seeded sigma: `(bit + retry * 2^16) XOR seed`.
pub fn sigma(bit: u32, retry: u32, seed: u64) -> Result<SigmaElement> {
    SigmaPair::new(bit, retry, MAX_RETRY_INDEX).map(|pair| pair.element(seed))
}

#[inline(always)]
pub(crate) const fn sigma_unchecked(bit: u32, retry: u32, seed: u64) -> SigmaElement {
    debug_assert!(bit <= MAX_BIT_POSITION && retry <= MAX_RETRY_INDEX);
    SigmaElement((bit as u64 + ((retry as u64) << 16)) ^ seed)
}

/// A deterministic family of 64-bit hash functions `h_key(sigma)`.
pub trait HashFamily {
    fn hash(&self, key: u64, sigma: SigmaElement) -> u64;
}

impl<T: HashFamily + ?Sized> HashFamily for &T {
    #[inline(always)]
    fn hash(&self, key: u64, sigma: SigmaElement) -> u64 {
        (**self).hash(key, sigma)
    }
}

/// The default family: a three-round multiply-xorshift finalizer keyed by sigma.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BitMixer;

impl HashFamily for BitMixer {
    #[inline(always)]
    fn hash(&self, key: u64, sigma: SigmaElement) -> u64 {
        mix(key, sigma)
    }
}

// Odd multiplier spreading the small sigma values across all 64 bits.
const SIGMA_SPREAD: u64 = 0xD6E8_FEB8_6659_FD93;
// Moremur finalizer multipliers, then the second multiplier of MurmurHash3's fmix64.
const ROUND_1: u64 = 0x3C79_AC49_2BA7_B653;
const ROUND_2: u64 = 0x1C69_B3F7_4AC4_AE35;
const ROUND_3: u64 = 0xC4CE_B9FE_1A85_EC53;

/// Mixes `key` under `sigma`.
///
/// For a fixed sigma the map is a bijection of `u64`: every step is an xor
/// with a constant, an xorshift, an odd multiplication or an addition.
#[inline(always)]
pub const fn mix(key: u64, sigma: SigmaElement) -> u64 {
    let spread = sigma.0.wrapping_add(1).wrapping_mul(SIGMA_SPREAD);
    let mut k = key ^ spread;
    k = (k ^ (k >> 27)).wrapping_mul(ROUND_1).wrapping_add(spread);
    k = (k ^ (k >> 33)).wrapping_mul(ROUND_2).wrapping_add(spread);
    k = (k ^ (k >> 27)).wrapping_mul(ROUND_3);
    k ^ (k >> 33)
}

/// A family answering from a fixed table, for replaying hand-worked traces.
///
/// Querying a pair that is not in the table panics.
#[derive(Debug, Clone, Default)]
pub struct StubFamily {
    table: HashMap<(u64, SigmaElement), u64>,
}

impl StubFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: u64, sigma: SigmaElement, value: u64) -> Self {
        self.table.insert((key, sigma), value);
        self
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl FromIterator<((u64, SigmaElement), u64)> for StubFamily {
    fn from_iter<I: IntoIterator<Item = ((u64, SigmaElement), u64)>>(iter: I) -> Self {
        Self {
            table: iter.into_iter().collect(),
        }
    }
}

impl HashFamily for StubFamily {
    fn hash(&self, key: u64, sigma: SigmaElement) -> u64 {
        match self.table.get(&(key, sigma)) {
            Some(&value) => value,
            None => panic!("stub hash family has no entry for key {key} and sigma {sigma}"),
        }
    }
}
