//! Reproducible key streams for statistical runs.
//!
//! Keys come from SplitMix64 in counter mode. Its increment and finalizer
//! multipliers are disjoint from the constants of [`crate::BitMixer`], so the
//! key stream carries no structure shared with the family under test.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
const fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Infinite stream of pseudorandom 64-bit keys determined by `seed`.
#[derive(Debug, Clone)]
pub struct KeyStream {
    counter: u64,
}

impl KeyStream {
    pub fn new(seed: u64) -> Self {
        Self {
            counter: splitmix_finalize(seed),
        }
    }

    /// The first `count` keys of the stream for `seed`.
    pub fn take_vec(seed: u64, count: usize) -> Vec<u64> {
        Self::new(seed).take(count).collect()
    }
}

impl Iterator for KeyStream {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        self.counter = self.counter.wrapping_add(GAMMA);
        Some(splitmix_finalize(self.counter))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (usize::MAX, None)
    }
}
