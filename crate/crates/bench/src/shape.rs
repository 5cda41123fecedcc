//! Orderings and ratios that timing results are expected to show on any machine.

use std::fmt;

use serde::Serialize;

use crate::algorithm::Algorithm;
use crate::timing::BenchRow;

/// Resource counts over which FlipHash time must stay flat.
pub const FLAT_N: [u64; 4] = [10, 1_000, 1_000_000, 1_000_000_000];
pub const FLAT_FACTOR: f64 = 3.0;
pub const GROWTH_FROM: u64 = 100;
pub const GROWTH_TO: u64 = 1_000_000_000;
pub const GROWTH_FACTOR: f64 = 2.0;
/// FlipHash must be no slower than JumpHash from this many resources on.
pub const CROSSOVER_N: u64 = 100;
/// Width of the windows compared around a power of two by [`sawtooth`].
pub const SAWTOOTH_WINDOW: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

impl fmt::Display for ShapeCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

fn mean_at(rows: &[BenchRow], algorithm: Algorithm, n: u64) -> Option<f64> {
    rows.iter()
        .find(|r| r.algorithm == algorithm && r.n == n)
        .map(|r| r.mean_ns)
}

/// FlipHash's slowest mean over [`FLAT_N`] is within [`FLAT_FACTOR`] of its fastest.
pub fn flatness(rows: &[BenchRow]) -> Option<ShapeCheck> {
    let means: Vec<f64> = FLAT_N
        .iter()
        .map(|&n| mean_at(rows, Algorithm::FlipHash, n))
        .collect::<Option<_>>()?;
    let max = means.iter().copied().fold(f64::MIN, f64::max);
    let min = means.iter().copied().fold(f64::MAX, f64::min);
    Some(ShapeCheck {
        name: "fliphash flat",
        holds: max <= FLAT_FACTOR * min,
        detail: format!("max/min mean = {:.3} (bound {FLAT_FACTOR})", max / min),
    })
}

/// JumpHash at [`GROWTH_TO`] is at least [`GROWTH_FACTOR`] slower than at [`GROWTH_FROM`].
pub fn divergence(rows: &[BenchRow]) -> Option<ShapeCheck> {
    let from = mean_at(rows, Algorithm::JumpHash, GROWTH_FROM)?;
    let to = mean_at(rows, Algorithm::JumpHash, GROWTH_TO)?;
    Some(ShapeCheck {
        name: "jumphash grows",
        holds: to >= GROWTH_FACTOR * from,
        detail: format!(
            "mean at n={GROWTH_TO} / n={GROWTH_FROM} = {:.3} (bound {GROWTH_FACTOR})",
            to / from
        ),
    })
}

/// FlipHash's mean is at most JumpHash's at every shared `n >= CROSSOVER_N`.
pub fn crossover(rows: &[BenchRow]) -> Option<ShapeCheck> {
    let pairs: Vec<(u64, f64, f64)> = rows
        .iter()
        .filter(|r| r.algorithm == Algorithm::FlipHash && r.n >= CROSSOVER_N)
        .filter_map(|r| Some((r.n, r.mean_ns, mean_at(rows, Algorithm::JumpHash, r.n)?)))
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let slower: Vec<u64> = pairs.iter().filter(|p| p.1 > p.2).map(|p| p.0).collect();
    let worst = pairs.iter().map(|p| p.1 / p.2).fold(f64::MIN, f64::max);
    Some(ShapeCheck {
        name: "fliphash no slower than jumphash",
        holds: slower.is_empty(),
        detail: format!(
            "{} points with n >= {CROSSOVER_N}, largest flip/jump ratio {worst:.3}, slower at {slower:?}",
            pairs.len()
        ),
    })
}

/// FlipHash's mean over `p+1..=p+16` exceeds its mean over `p-1..=p` for the
/// largest power of two `p` the rows cover that way.
pub fn sawtooth(rows: &[BenchRow]) -> Option<ShapeCheck> {
    let window_mean = |ns: std::ops::RangeInclusive<u64>| -> Option<f64> {
        let count = ns.clone().count() as f64;
        let sum = ns
            .map(|n| mean_at(rows, Algorithm::FlipHash, n))
            .sum::<Option<f64>>()?;
        Some(sum / count)
    };
    (1..63).rev().find_map(|k| {
        let p = 1u64 << k;
        let below = window_mean(p - 1..=p)?;
        let above = window_mean(p + 1..=p + SAWTOOTH_WINDOW)?;
        Some(ShapeCheck {
            name: "fliphash sawtooth",
            holds: above > below,
            detail: format!(
                "mean over n={}..={} is {above:.3}ns, over n={}..={p} is {below:.3}ns",
                p + 1,
                p + SAWTOOTH_WINDOW,
                p - 1
            ),
        })
    })
}

/// Every check the rows contain enough points for.
pub fn timing_shape(rows: &[BenchRow]) -> Vec<ShapeCheck> {
    [
        flatness(rows),
        divergence(rows),
        crossover(rows),
        sawtooth(rows),
    ]
    .into_iter()
    .flatten()
    .collect()
}
