use serde::Serialize;

use crate::error::{Error, Result};
use crate::fliphash::ResourceCount;

/// Largest bucket count a histogram will allocate.
pub const MAX_BUCKETS: u64 = 1 << 26;

/// Per-resource counts of hash outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(n: ResourceCount) -> Result<Self> {
        if n.get() > MAX_BUCKETS {
            return Err(Error::TooManyBuckets {
                n: n.get(),
                limit: MAX_BUCKETS,
            });
        }
        Ok(Self {
            counts: vec![0; n.get() as usize],
            total: 0,
        })
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::ZeroResources);
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Records that `key` hashed to `value`.
    #[inline]
    pub fn record(&mut self, key: u64, value: u64) -> Result<()> {
        let len = self.counts.len() as u64;
        // Clamp before the cast so a 32-bit usize cannot wrap an out-of-range value into range.
        match self.counts.get_mut(value.min(len) as usize) {
            Some(count) => {
                *count += 1;
                self.total += 1;
                Ok(())
            }
            None => Err(Error::OutputOutOfRange {
                key,
                value,
                n: self.counts.len() as u64,
            }),
        }
    }

    /// Adds `other`'s counts into `self`.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::HistogramShapeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            *mine += theirs;
        }
        self.total += other.total;
        Ok(())
    }

    /// Ratio of the largest to the smallest count.
    pub fn max_min_ratio(&self) -> f64 {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        let min = self.counts.iter().copied().min().unwrap_or(0);
        max as f64 / min as f64
    }
}

/// Tabulates `hash(key)` over `keys`; any output `>= n` is an error.
pub fn build_histogram<F, I>(mut hash: F, n: ResourceCount, keys: I) -> Result<Histogram>
where
    F: FnMut(u64) -> u64,
    I: IntoIterator<Item = u64>,
{
    let mut histogram = Histogram::new(n)?;
    for key in keys {
        histogram.record(key, hash(key))?;
    }
    if histogram.is_empty() {
        return Err(Error::NoKeys);
    }
    Ok(histogram)
}
