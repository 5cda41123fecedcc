use std::fmt;
use std::hint::black_box;
use std::time::{Duration, Instant};

use fliphash_core::jump::MAX_RESOURCES as JUMP_MAX_RESOURCES;
use fliphash_core::{FlipHasher, JumpHasher, KeyStream, RangeHash, ResourceCount};
use serde::Serialize;

use crate::algorithm::Algorithm;
use crate::error::{BenchError, Result};

pub const MIN_KEYS_PER_POINT: usize = 1000;
pub const MIN_BATCH_SIZE: usize = 100;
/// Fewest batches per point for the percentiles to mean anything.
pub const MIN_BATCHES: usize = 10;
/// Widest `n_max - n_min` accepted by [`sawtooth_scan`].
pub const MAX_SAWTOOTH_SPAN: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    /// Resource counts, ascending.
    pub n_values: Vec<ResourceCount>,
    pub keys_per_point: usize,
    /// Evaluations per timed batch.
    pub batch_size: usize,
    pub warmup_iterations: usize,
    /// Lower and upper percentile, in percent, reported as `p10_ns` and `p90_ns`.
    pub percentiles: [f64; 2],
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            n_values: (0..10)
                .map(|e| ResourceCount::new(10u64.pow(e)).unwrap())
                .collect(),
            keys_per_point: 100_000,
            batch_size: 1000,
            warmup_iterations: 1000,
            percentiles: [10.0, 90.0],
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(BenchError::Config(msg));
        if self.algorithms.is_empty() {
            return fail("no algorithm selected".into());
        }
        if self.n_values.is_empty() {
            return fail("no resource count selected".into());
        }
        if !self.n_values.windows(2).all(|w| w[0] <= w[1]) {
            return fail("resource counts must be sorted ascending".into());
        }
        if self.keys_per_point < MIN_KEYS_PER_POINT {
            return fail(format!(
                "keys per point must be at least {MIN_KEYS_PER_POINT}, got {}",
                self.keys_per_point
            ));
        }
        if self.batch_size < MIN_BATCH_SIZE {
            return fail(format!(
                "batch size must be at least {MIN_BATCH_SIZE}, got {}",
                self.batch_size
            ));
        }
        if self.keys_per_point / self.batch_size < MIN_BATCHES {
            return fail(format!(
                "{} keys make fewer than {MIN_BATCHES} batches of {}",
                self.keys_per_point, self.batch_size
            ));
        }
        let [low, high] = self.percentiles;
        if !(0.0..=100.0).contains(&low) || !(low..=100.0).contains(&high) {
            return fail(format!("invalid percentiles {low} and {high}"));
        }
        let largest = self.n_values.last().unwrap().get();
        if self.algorithms.contains(&Algorithm::JumpHash) && largest > JUMP_MAX_RESOURCES {
            return fail(format!(
                "jumphash supports at most {JUMP_MAX_RESOURCES} resources, got {largest}"
            ));
        }
        Ok(())
    }
}

/// Timing summary of one algorithm at one resource count, per evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub n: u64,
    pub mean_ns: f64,
    pub p10_ns: f64,
    pub p90_ns: f64,
}

impl fmt::Display for BenchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} mean={:.3}ns p10={:.3}ns p90={:.3}ns",
            self.algorithm, self.n, self.mean_ns, self.p10_ns, self.p90_ns
        )
    }
}

/// Smallest observable step of the monotonic clock.
pub fn clock_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..100 {
        let start = Instant::now();
        let mut now = Instant::now();
        while now == start {
            now = Instant::now();
        }
        best = best.min(now - start);
    }
    best
}

/// Pins the calling thread to the CPU it is running on. Returns whether it worked.
#[cfg(target_os = "linux")]
pub fn pin_to_current_cpu() -> bool {
    // SAFETY: the set is zero-initialized and sized by the libc type.
    unsafe {
        let cpu = libc::sched_getcpu();
        if cpu < 0 {
            return false;
        }
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu as usize, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_to_current_cpu() -> bool {
    false
}

/// Times every configured algorithm at every resource count.
///
/// Rows come algorithm by algorithm, in `n_values` order. Each batch chains
/// its evaluations, XOR-ing every output into the next key.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let resolution = clock_resolution();
    let resolution_ns = resolution.as_nanos() as u64;
    // Assumes at least 1 ns per evaluation; the clock step must stay within 10% of a batch.
    if resolution_ns.saturating_mul(10) > config.batch_size as u64 {
        return Err(BenchError::ClockTooCoarse {
            resolution_ns,
            batch_size: config.batch_size,
            suggested: (resolution_ns * 10) as usize,
        });
    }
    pin_to_current_cpu();
    let keys = KeyStream::take_vec(config.seed, config.keys_per_point);
    let warmup = KeyStream::take_vec(!config.seed, config.warmup_iterations);
    let mut rows = Vec::with_capacity(config.algorithms.len() * config.n_values.len());
    for &algorithm in &config.algorithms {
        for &n in &config.n_values {
            let batches = match algorithm {
                Algorithm::FlipHash => time_batches(&FlipHasher::new(), n, &keys, &warmup, config),
                Algorithm::JumpHash => time_batches(&JumpHasher::new(), n, &keys, &warmup, config),
            };
            rows.push(summarize(algorithm, n, batches, config.percentiles));
        }
    }
    Ok(rows)
}

/// Times FlipHash at every `n` in `n_min..=n_max`, keeping the rest of `config`.
pub fn sawtooth_scan(n_min: u64, n_max: u64, config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if n_min == 0 || n_min > n_max {
        return Err(BenchError::Config(format!(
            "empty scan range [{n_min}, {n_max}]"
        )));
    }
    if n_max - n_min > MAX_SAWTOOTH_SPAN {
        return Err(BenchError::Config(format!(
            "scan range [{n_min}, {n_max}] is wider than {MAX_SAWTOOTH_SPAN}"
        )));
    }
    let config = BenchConfig {
        algorithms: vec![Algorithm::FlipHash],
        n_values: (n_min..=n_max)
            .map(|n| ResourceCount::new(n).unwrap())
            .collect(),
        ..config.clone()
    };
    bench(&config)
}

#[inline(never)]
fn chained<H: RangeHash>(hasher: &H, n: ResourceCount, keys: &[u64], carry: u64) -> u64 {
    keys.iter()
        .fold(carry, |acc, &key| hasher.hash_range(key ^ acc, n))
}

// Per-evaluation nanoseconds of each batch.
fn time_batches<H: RangeHash>(
    hasher: &H,
    n: ResourceCount,
    keys: &[u64],
    warmup: &[u64],
    config: &BenchConfig,
) -> Vec<f64> {
    let mut carry = chained(hasher, n, black_box(warmup), 0);
    keys.chunks_exact(config.batch_size)
        .map(|batch| {
            let batch = black_box(batch);
            let start = Instant::now();
            carry = black_box(chained(hasher, n, batch, carry));
            let elapsed = start.elapsed();
            // A zero reading cannot happen past the resolution check, but times must stay positive.
            (elapsed.as_nanos().max(1) as f64) / batch.len() as f64
        })
        .collect()
}

fn summarize(
    algorithm: Algorithm,
    n: ResourceCount,
    mut batches: Vec<f64>,
    percentiles: [f64; 2],
) -> BenchRow {
    batches.sort_by(f64::total_cmp);
    BenchRow {
        algorithm,
        n: n.get(),
        mean_ns: batches.iter().sum::<f64>() / batches.len() as f64,
        p10_ns: percentile(&batches, percentiles[0]),
        p90_ns: percentile(&batches, percentiles[1]),
    }
}

// Linear interpolation between closest ranks of a sorted sample.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let rank = pct / 100.0 * (sorted.len() - 1) as f64;
    let (low, high) = (rank.floor() as usize, rank.ceil() as usize);
    sorted[low] + (sorted[high] - sorted[low]) * (rank - low as f64)
}
