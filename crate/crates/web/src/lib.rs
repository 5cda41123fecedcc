//! Browser bindings. Every export takes plain numbers or decimal strings (for
//! 64-bit values) and returns a JSON document.

use fliphash_core::statlab::{build_histogram, remap as remap_report, uniformity};
use fliphash_core::{FlipHasher, JumpHasher, KeyStream, RangeHash, ResourceCount};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest range the distribution view accepts.
pub const MAX_BUCKETS: u32 = 4096;
/// Largest side of the remap flow matrix.
pub const MAX_FLOW_SIDE: u32 = 64;
pub const MAX_KEYS: u32 = 10_000_000;

fn parse_u64(value: &str, what: &str) -> Result<u64, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("{what} must be an unsigned 64-bit integer, got '{value}'"))
}

fn resources(n: u64, limit: u32) -> Result<ResourceCount, String> {
    if n > u64::from(limit) {
        return Err(format!("at most {limit} resources here, got {n}"));
    }
    ResourceCount::new(n).map_err(|e| e.to_string())
}

fn hasher(algorithm: &str, seed: u64) -> Result<Box<dyn RangeHash>, String> {
    match algorithm {
        "fliphash" => Ok(Box::new(FlipHasher::with_seed(seed))),
        "jumphash" => Ok(Box::new(JumpHasher::with_seed(seed))),
        other => Err(format!("unknown algorithm '{other}'")),
    }
}

fn key_count(keys: u32) -> Result<usize, String> {
    if keys == 0 || keys > MAX_KEYS {
        return Err(format!("key count must be in [1, {MAX_KEYS}], got {keys}"));
    }
    Ok(keys as usize)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

pub fn trace_json(key: &str, n: &str, seed: &str, m: u32) -> Result<String, String> {
    let key = parse_u64(key, "key")?;
    let n = ResourceCount::new(parse_u64(n, "n")?).map_err(|e| e.to_string())?;
    let hasher = FlipHasher::with_seed(parse_u64(seed, "seed")?)
        .with_max_retries(m)
        .map_err(|e| e.to_string())?;
    Ok(to_json(&hasher.hash_traced(key, n)))
}

#[derive(Serialize)]
struct Distribution {
    counts: Vec<u64>,
    chi_squared: f64,
    degrees_of_freedom: u64,
    p_value: f64,
    l2_distance: f64,
    max_min_ratio: Option<f64>,
}

pub fn distribution_json(algorithm: &str, n: u32, keys: u32, seed: &str) -> Result<String, String> {
    let n = resources(u64::from(n), MAX_BUCKETS)?;
    let hasher = hasher(algorithm, 0)?;
    let keys = KeyStream::new(parse_u64(seed, "seed")?).take(key_count(keys)?);
    let histogram =
        build_histogram(|k| hasher.hash_range(k, n), n, keys).map_err(|e| e.to_string())?;
    let report = uniformity(&histogram).map_err(|e| e.to_string())?;
    let ratio = histogram.max_min_ratio();
    Ok(to_json(&Distribution {
        counts: histogram.counts().to_vec(),
        chi_squared: report.chi_squared,
        degrees_of_freedom: report.degrees_of_freedom,
        p_value: report.p_value,
        l2_distance: report.l2_distance,
        max_min_ratio: ratio.is_finite().then_some(ratio),
    }))
}

#[derive(Serialize)]
struct Remap {
    n_before: u64,
    n_after: u64,
    moved: u64,
    moved_fraction: f64,
    expected_fraction: f64,
    illegal_moves: u64,
    /// `flows[i][j]` keys went from resource `i` to resource `j`.
    flows: Vec<Vec<u64>>,
}

pub fn remap_json(
    algorithm: &str,
    n_before: u32,
    n_after: u32,
    keys: u32,
    seed: &str,
) -> Result<String, String> {
    let before = resources(u64::from(n_before), MAX_FLOW_SIDE)?;
    let after = resources(u64::from(n_after), MAX_FLOW_SIDE)?;
    let hasher = hasher(algorithm, 0)?;
    let keys = KeyStream::take_vec(parse_u64(seed, "seed")?, key_count(keys)?);
    let report = remap_report(hasher.as_ref(), before, after, &keys).map_err(|e| e.to_string())?;
    let mut flows = vec![vec![0; n_after as usize]; n_before as usize];
    for &key in &keys {
        flows[hasher.hash_range(key, before) as usize][hasher.hash_range(key, after) as usize] += 1;
    }
    Ok(to_json(&Remap {
        n_before: report.n_before,
        n_after: report.n_after,
        moved: report.moved,
        moved_fraction: report.moved_fraction,
        expected_fraction: report.expected_moved_fraction(),
        illegal_moves: report.illegal_moves,
        flows,
    }))
}

/// Every intermediate of one FlipHash evaluation.
#[wasm_bindgen]
pub fn trace(key: &str, n: &str, seed: &str, m: u32) -> Result<String, JsValue> {
    trace_json(key, n, seed, m).map_err(|e| JsValue::from_str(&e))
}

/// Per-resource counts of `keys` random keys and their chi-squared summary.
#[wasm_bindgen]
pub fn distribution(algorithm: &str, n: u32, keys: u32, seed: &str) -> Result<String, JsValue> {
    distribution_json(algorithm, n, keys, seed).map_err(|e| JsValue::from_str(&e))
}

/// How `keys` random keys move when the range changes from `n_before` to `n_after`.
#[wasm_bindgen]
pub fn remap(
    algorithm: &str,
    n_before: u32,
    n_after: u32,
    keys: u32,
    seed: &str,
) -> Result<String, JsValue> {
    remap_json(algorithm, n_before, n_after, keys, seed).map_err(|e| JsValue::from_str(&e))
}
