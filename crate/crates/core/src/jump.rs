//! Jump Consistent Hash (Lamping and Veach), the logarithmic-time baseline.

use crate::fliphash::ResourceCount;
use crate::{RangeHash, Reseed};

/// Largest resource count in the published routine's domain.
pub const MAX_RESOURCES: u64 = i64::MAX as u64;

/// JumpHash, optionally seeded by XOR-ing the seed into the key.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JumpHasher {
    seed: u64,
}

impl JumpHasher {
    pub const fn new() -> Self {
        Self { seed: 0 }
    }

    pub const fn with_seed(seed: u64) -> Self {
        Self { seed }
    }

    pub const fn seed(&self) -> u64 {
        self.seed
    }

    /// Hashes `key` into `[0, n)`.
    ///
    /// Panics if `n` exceeds [`MAX_RESOURCES`].
    #[inline]
    pub fn hash(&self, key: u64, n: ResourceCount) -> u64 {
        let n = n.get();
        assert!(
            n <= MAX_RESOURCES,
            "jump hash supports at most 2^63 - 1 resources, got {n}"
        );
        let n = n as i64;
        let mut state = key ^ self.seed;
        let mut bucket: i64 = -1;
        let mut next: i64 = 0;
        while next < n {
            bucket = next;
            state = state.wrapping_mul(2862933555777941757).wrapping_add(1);
            next =
                ((bucket + 1) as f64 * ((1u64 << 31) as f64 / ((state >> 33) + 1) as f64)) as i64;
        }
        bucket as u64
    }
}

impl RangeHash for JumpHasher {
    #[inline]
    fn hash_range(&self, key: u64, n: ResourceCount) -> u64 {
        self.hash(key, n)
    }
}

impl Reseed for JumpHasher {
    fn reseeded(&self, seed: u64) -> Self {
        Self::with_seed(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::KeyStream;

    // Transcription of the reference C++ routine, on its own 32-bit bucket type.
    fn reference(mut key: u64, num_buckets: i32) -> i32 {
        let mut b: i64 = -1;
        let mut j: i64 = 0;
        while j < num_buckets as i64 {
            b = j;
            key = key.wrapping_mul(2862933555777941757).wrapping_add(1);
            j = ((b + 1) as f64 * ((1i64 << 31) as f64 / ((key >> 33) + 1) as f64)) as i64;
        }
        b as i32
    }

    fn n(n: u64) -> ResourceCount {
        ResourceCount::new(n).unwrap()
    }

    #[test]
    fn matches_reference() {
        let hasher = JumpHasher::new();
        assert_eq!(hasher.hash(0, n(2)), reference(0, 2) as u64);
        for key in KeyStream::new(1).take(2000).chain([0, 1, u64::MAX]) {
            for buckets in [1, 2, 3, 10, 100, 1000, 65_536, 1_000_000_000, i32::MAX] {
                assert_eq!(
                    hasher.hash(key, n(buckets as u64)),
                    reference(key, buckets) as u64,
                    "key {key} buckets {buckets}"
                );
            }
        }
    }

    #[test]
    fn single_bucket() {
        for key in KeyStream::new(2).take(100) {
            assert_eq!(JumpHasher::with_seed(key).hash(key, ResourceCount::ONE), 0);
        }
    }

    #[test]
    fn seed_is_folded_into_key() {
        for key in KeyStream::new(3).take(100) {
            assert_eq!(
                JumpHasher::with_seed(0xABCD).hash(key, n(977)),
                JumpHasher::new().hash(key ^ 0xABCD, n(977))
            );
        }
    }

    #[test]
    fn monotone() {
        let hasher = JumpHasher::new();
        for key in KeyStream::new(4).take(10_000) {
            let mut previous = 0;
            for buckets in 2..=1024 {
                let v = hasher.hash(key, n(buckets));
                assert!(v == previous || v == buckets - 1);
                previous = v;
            }
        }
    }

    #[test]
    fn largest_domain() {
        let v = JumpHasher::new().hash(12345, n(MAX_RESOURCES));
        assert!(v < MAX_RESOURCES);
    }

    #[test]
    #[should_panic(expected = "at most 2^63 - 1")]
    fn beyond_domain_panics() {
        JumpHasher::new().hash(1, n(MAX_RESOURCES + 1));
    }
}
