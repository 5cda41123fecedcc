use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fliphash::ResourceCount;
use crate::RangeHash;

/// Key movement between two resource counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemapReport {
    pub n_before: u64,
    pub n_after: u64,
    pub keys: u64,
    pub moved: u64,
    pub moved_fraction: f64,
    /// Keys whose old and new values both lie below `min(n_before, n_after)`
    /// yet differ. Zero for any monotone hash.
    pub illegal_moves: u64,
}

impl RemapReport {
    /// Fraction of keys a minimal-disruption hash moves: `|n' - n| / max(n, n')`.
    pub fn expected_moved_fraction(&self) -> f64 {
        self.n_before.abs_diff(self.n_after) as f64 / self.n_before.max(self.n_after) as f64
    }

    /// Distance of the observed moved fraction from the expected one, in
    /// binomial standard deviations.
    pub fn binomial_z_score(&self) -> f64 {
        let p = self.expected_moved_fraction();
        let sd = (p * (1.0 - p) / self.keys as f64).sqrt();
        if sd == 0.0 {
            return if self.moved_fraction == p {
                0.0
            } else {
                f64::INFINITY
            };
        }
        (self.moved_fraction - p) / sd
    }
}

impl fmt::Display for RemapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n_before={} n_after={} keys={} moved={} moved_fraction={:.6} illegal_moves={}",
            self.n_before,
            self.n_after,
            self.keys,
            self.moved,
            self.moved_fraction,
            self.illegal_moves
        )
    }
}

fn report(n_before: u64, n_after: u64, before: &[u64], after: &[u64]) -> RemapReport {
    let floor = n_before.min(n_after);
    let (moved, illegal_moves) = before
        .iter()
        .zip(after)
        .filter(|(old, new)| old != new)
        .fold((0, 0), |(moved, illegal), (&old, &new)| {
            (moved + 1, illegal + (old < floor && new < floor) as u64)
        });
    RemapReport {
        n_before,
        n_after,
        keys: before.len() as u64,
        moved,
        moved_fraction: moved as f64 / before.len() as f64,
        illegal_moves,
    }
}

/// Measures how `keys` move when the resource count changes from `n_before` to `n_after`.
pub fn remap<H: RangeHash + ?Sized>(
    hasher: &H,
    n_before: ResourceCount,
    n_after: ResourceCount,
    keys: &[u64],
) -> Result<RemapReport> {
    if keys.is_empty() {
        return Err(Error::NoKeys);
    }
    let before: Vec<u64> = keys
        .iter()
        .map(|&k| hasher.hash_range(k, n_before))
        .collect();
    let after: Vec<u64> = keys
        .iter()
        .map(|&k| hasher.hash_range(k, n_after))
        .collect();
    Ok(report(n_before.get(), n_after.get(), &before, &after))
}

/// One report per step `n -> n + 1` for `n` in `n_min..n_max`.
pub fn scan_monotonicity<H: RangeHash + ?Sized>(
    hasher: &H,
    n_min: u64,
    n_max: u64,
    keys: &[u64],
) -> Result<Vec<RemapReport>> {
    if n_min == 0 || n_min >= n_max {
        return Err(Error::InvalidScanRange { n_min, n_max });
    }
    if keys.is_empty() {
        return Err(Error::NoKeys);
    }
    let evaluate = |n: u64, out: &mut Vec<u64>| {
        let n = ResourceCount::new(n).expect("n >= 1");
        out.clear();
        out.extend(keys.iter().map(|&k| hasher.hash_range(k, n)));
    };
    let mut before = Vec::with_capacity(keys.len());
    let mut after = Vec::with_capacity(keys.len());
    evaluate(n_min, &mut before);
    let mut reports = Vec::with_capacity((n_max - n_min).min(1 << 20) as usize);
    for n in n_min..n_max {
        evaluate(n + 1, &mut after);
        reports.push(report(n, n + 1, &before, &after));
        std::mem::swap(&mut before, &mut after);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::KeyStream;
    use crate::{FlipHasher, JumpHasher};

    fn n(n: u64) -> ResourceCount {
        ResourceCount::new(n).unwrap()
    }

    #[test]
    fn constant_function_never_moves() {
        let keys = KeyStream::take_vec(1, 100);
        let reports = scan_monotonicity(&|_: u64, _: ResourceCount| 0, 1, 50, &keys).unwrap();
        assert_eq!(reports.len(), 49);
        assert!(reports
            .iter()
            .all(|r| r.moved == 0 && r.moved_fraction == 0.0));
    }

    #[test]
    fn modulo_is_counted_illegal() {
        let keys: Vec<u64> = (0..100).collect();
        let modulo = |k: u64, n: ResourceCount| k % n.get();
        let report = remap(&modulo, n(10), n(11), &keys).unwrap();
        // Counted by hand: 90 keys move, 81 of them between retained buckets.
        assert_eq!((report.moved, report.illegal_moves), (90, 81));
    }

    #[test]
    fn shrinking_is_checked_too() {
        let keys = KeyStream::take_vec(2, 10_000);
        let report = remap(&FlipHasher::new(), n(100), n(60), &keys).unwrap();
        assert_eq!(report.illegal_moves, 0);
        assert!((report.expected_moved_fraction() - 0.4).abs() < 1e-12);
        assert!(report.binomial_z_score().abs() < 5.0);
    }

    #[test]
    fn fliphash_and_jumphash_have_no_illegal_moves() {
        let keys = KeyStream::take_vec(3, 2_000);
        for reports in [
            scan_monotonicity(&FlipHasher::with_seed(1), 1, 600, &keys).unwrap(),
            scan_monotonicity(&JumpHasher::with_seed(1), 1, 600, &keys).unwrap(),
        ] {
            assert!(reports.iter().all(|r| r.illegal_moves == 0));
        }
    }

    #[test]
    fn moved_fraction_is_binomial() {
        let keys = KeyStream::take_vec(4, 100_000);
        for count in [9, 99, 999] {
            let report = remap(&FlipHasher::new(), n(count), n(count + 1), &keys).unwrap();
            assert!(report.binomial_z_score().abs() < 5.0, "{report}");
        }
    }

    #[test]
    fn invalid_ranges() {
        let keys = [1, 2, 3];
        let h = FlipHasher::new();
        assert!(matches!(
            scan_monotonicity(&h, 0, 5, &keys),
            Err(Error::InvalidScanRange { .. })
        ));
        assert!(matches!(
            scan_monotonicity(&h, 5, 5, &keys),
            Err(Error::InvalidScanRange { .. })
        ));
        assert_eq!(scan_monotonicity(&h, 1, 5, &[]), Err(Error::NoKeys));
        assert_eq!(remap(&h, n(1), n(2), &[]), Err(Error::NoKeys));
    }
}
