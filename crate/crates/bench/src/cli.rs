//! The `fliphash` command line.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fliphash_core::hash_family::DEFAULT_MAX_RETRIES;
use fliphash_core::jump::MAX_RESOURCES as JUMP_MAX_RESOURCES;
use fliphash_core::statlab::{
    build_histogram, independence_check, remap_spread, scan_monotonicity, uniformity,
    IndependenceAxis, IndependenceOutcome, SIGNIFICANCE,
};
use fliphash_core::{FlipHasher, KeyStream, RangeExponent, RangeHash, ResourceCount};
use serde::Serialize;

use crate::algorithm::Algorithm;
use crate::error::BenchError;
use crate::output::{sink, write_records, Format};
use crate::shape::{timing_shape, ShapeCheck};
use crate::timing::{bench, sawtooth_scan, BenchConfig};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    Assertion = 2,
    Io = 3,
}

#[derive(Debug, Parser)]
#[command(
    name = "fliphash",
    version,
    about = "Consistent range-hashing checks and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print every intermediate of one FlipHash evaluation.
    Trace(TraceArgs),
    /// Chi-squared and L2 distance of the key distribution over [0, n).
    Uniformity(UniformityArgs),
    /// Key movement at every step n -> n+1 between --n-min and --n-max.
    Remap(RemapArgs),
    /// Independence of hashes across seeds or across ranges.
    Independence(IndependenceArgs),
    /// Per-evaluation wall time across resource counts.
    Bench(BenchArgs),
    /// FlipHash wall time at every n between --n-min and --n-max.
    Sawtooth(SawtoothArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long, value_parser = parse_u64)]
    key: u64,
    #[arg(long, value_parser = parse_u64)]
    n: u64,
    #[arg(long, default_value_t = 0, value_parser = parse_u64)]
    seed: u64,
    /// Retry bound.
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    m: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct UniformityArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::FlipHash])]
    algorithm: Vec<Algorithm>,
    #[arg(long, default_value_t = 1000, value_parser = parse_u64)]
    n: u64,
    /// Key counts; one report per count and algorithm.
    #[arg(long, value_delimiter = ',', default_values_t = [1_000_000], value_parser = parse_u64)]
    keys: Vec<u64>,
    #[arg(long, default_value_t = 0, value_parser = parse_u64)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    m: u32,
    /// Fail unless every p-value lies in [1e-3, 1 - 1e-3] and, when both
    /// algorithms run, FlipHash's L2 distance is within 2x of JumpHash's.
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct RemapArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::FlipHash])]
    algorithm: Vec<Algorithm>,
    #[arg(long, default_value_t = 1, value_parser = parse_u64)]
    n_min: u64,
    #[arg(long, default_value_t = 1024, value_parser = parse_u64)]
    n_max: u64,
    #[arg(long, default_value_t = 100_000, value_parser = parse_u64)]
    keys: u64,
    /// Key stream seed; the hashers are unseeded.
    #[arg(long, default_value_t = 0, value_parser = parse_u64)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    m: u32,
    /// Fail unless no key moves between two persisting resources.
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Axis {
    /// Same n, seeds --seed and --other-seed.
    Seeds,
    /// Ranges 2^from and 2^to, keeping keys whose second hash is at least 2^from.
    Ranges,
    /// Where keys moved by growing 2^from to 2^to land in [2^from, 2^to).
    Spread,
}

#[derive(Debug, Args)]
struct IndependenceArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::FlipHash])]
    algorithm: Vec<Algorithm>,
    #[arg(long, value_enum)]
    axis: Axis,
    /// Hasher seed; the first of the two seeds on the seeds axis.
    #[arg(long, default_value_t = 1, value_parser = parse_u64)]
    seed: u64,
    #[arg(long, value_parser = parse_u64)]
    other_seed: Option<u64>,
    #[arg(long, value_parser = parse_u64)]
    n: Option<u64>,
    #[arg(long)]
    from: Option<u32>,
    #[arg(long)]
    to: Option<u32>,
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_u64)]
    keys: u64,
    #[arg(long, default_value_t = 0, value_parser = parse_u64)]
    key_seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    m: u32,
    /// Fail unless every test is powered and its p-value lies in [1e-3, 1 - 1e-3].
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TimingArgs {
    #[arg(long, default_value_t = 100_000, value_parser = parse_u64)]
    keys: u64,
    /// Evaluations per timed batch.
    #[arg(long, default_value_t = 1000, value_parser = parse_u64)]
    batch: u64,
    #[arg(long, default_value_t = 1000, value_parser = parse_u64)]
    warmup: u64,
    #[arg(long, default_value_t = 0, value_parser = parse_u64)]
    seed: u64,
    /// Fail unless every timing-shape check the measured points allow holds.
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = Algorithm::ALL)]
    algorithm: Vec<Algorithm>,
    /// Resource counts, ascending. Defaults to 1, 10, ..., 10^9.
    #[arg(long, value_delimiter = ',', value_parser = parse_u64)]
    n: Vec<u64>,
    #[command(flatten)]
    timing: TimingArgs,
}

#[derive(Debug, Args)]
struct SawtoothArgs {
    #[arg(long, default_value_t = 2, value_parser = parse_u64)]
    n_min: u64,
    #[arg(long, default_value_t = 100, value_parser = parse_u64)]
    n_max: u64,
    #[command(flatten)]
    timing: TimingArgs,
}

// Decimal, 0x-prefixed hex, `_` separators, or an exact power-of-ten form like `1e6`.
fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.replace('_', "");
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()
    } else if let Some((mantissa, exponent)) = s.split_once(['e', 'E']) {
        let mantissa: u64 = mantissa.parse().map_err(|_| "bad mantissa".to_string())?;
        let exponent: u32 = exponent.parse().map_err(|_| "bad exponent".to_string())?;
        10u64
            .checked_pow(exponent)
            .and_then(|p| p.checked_mul(mantissa))
    } else {
        s.parse().ok()
    };
    parsed.ok_or_else(|| format!("'{s}' is not an unsigned 64-bit integer"))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Assertion(String),
    Bench(BenchError),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::Bench(e)
    }
}

impl From<fliphash_core::Error> for Failure {
    fn from(e: fliphash_core::Error) -> Self {
        Failure::Bench(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Bench(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `args` (program name first), runs the subcommand and returns the exit status.
pub fn run<I, T>(args: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                Exit::Usage
            } else {
                Exit::Success
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Trace(a) => trace(a),
        Command::Uniformity(a) => uniformity_cmd(a),
        Command::Remap(a) => remap_cmd(a),
        Command::Independence(a) => independence_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Sawtooth(a) => sawtooth_cmd(a),
    };
    match outcome {
        Ok(()) => Exit::Success,
        Err(Failure::Usage(msg)) => {
            eprintln!("fliphash: {msg}");
            Exit::Usage
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("fliphash: assertion failed: {msg}");
            Exit::Assertion
        }
        Err(Failure::Bench(e)) => {
            eprintln!("fliphash: {e}");
            if e.is_io() {
                Exit::Io
            } else {
                Exit::Usage
            }
        }
    }
}

fn emit<T: Serialize + fmt::Display>(
    output: &OutputArgs,
    default: Format,
    records: &[T],
) -> Outcome {
    let out = sink(output.out.as_deref())?;
    write_records(out, output.format.unwrap_or(default), records)?;
    Ok(())
}

fn resource_count(n: u64) -> Result<ResourceCount, Failure> {
    ResourceCount::new(n).map_err(|e| usage(e.to_string()))
}

fn check_domain(algorithms: &[Algorithm], n: u64) -> Outcome {
    if algorithms.contains(&Algorithm::JumpHash) && n > JUMP_MAX_RESOURCES {
        return Err(usage(format!(
            "jumphash supports at most {JUMP_MAX_RESOURCES} resources, got {n}"
        )));
    }
    Ok(())
}

fn key_count(keys: u64) -> Result<usize, Failure> {
    match usize::try_from(keys) {
        Ok(0) => Err(usage("--keys must be positive")),
        Ok(k) => Ok(k),
        Err(_) => Err(usage(format!("--keys {keys} does not fit in memory"))),
    }
}

#[derive(Debug, Serialize)]
struct TraceRow {
    key: u64,
    n: u64,
    r: u32,
    a: u64,
    b: u32,
    c: u64,
    d: u64,
    /// Draws separated by `;`.
    draws: String,
    fallback: Option<u64>,
    path: char,
    value: u64,
}

impl fmt::Display for TraceRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

fn trace(args: TraceArgs) -> Outcome {
    let n = resource_count(args.n)?;
    let hasher = FlipHasher::with_seed(args.seed)
        .with_max_retries(args.m)
        .map_err(|e| usage(e.to_string()))?;
    let trace = hasher.hash_traced(args.key, n);
    if args.output.format == Some(Format::Csv) {
        let row = TraceRow {
            key: trace.key,
            n: trace.n,
            r: trace.r,
            a: trace.direct.a,
            b: trace.direct.b,
            c: trace.direct.c,
            d: trace.d(),
            draws: trace
                .draws
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            fallback: trace.fallback.map(|f| f.value),
            path: trace.path.label(),
            value: trace.value,
        };
        return emit(&args.output, Format::Csv, &[row]);
    }
    emit(&args.output, Format::Text, &[trace])
}

#[derive(Debug, Serialize)]
struct UniformityRow {
    algorithm: Algorithm,
    n: u64,
    keys: u64,
    chi_squared: f64,
    degrees_of_freedom: u64,
    p_value: f64,
    l2_distance: f64,
    max_min_ratio: f64,
}

impl fmt::Display for UniformityRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} keys={} chi_squared={:.4} dof={} p_value={:.6} l2_distance={:.6e} max_min_ratio={:.4}",
            self.algorithm,
            self.n,
            self.keys,
            self.chi_squared,
            self.degrees_of_freedom,
            self.p_value,
            self.l2_distance,
            self.max_min_ratio
        )
    }
}

fn uniformity_cmd(args: UniformityArgs) -> Outcome {
    let n = resource_count(args.n)?;
    check_domain(&args.algorithm, args.n)?;
    let mut rows = Vec::new();
    for &count in &args.keys {
        let count = key_count(count)?;
        for &algorithm in &args.algorithm {
            let hasher = algorithm
                .hasher(0, args.m)
                .map_err(|e| usage(e.to_string()))?;
            let histogram = build_histogram(
                |k| hasher.hash_range(k, n),
                n,
                KeyStream::new(args.seed).take(count),
            )?;
            let report = uniformity(&histogram)?;
            rows.push(UniformityRow {
                algorithm,
                n: args.n,
                keys: count as u64,
                chi_squared: report.chi_squared,
                degrees_of_freedom: report.degrees_of_freedom,
                p_value: report.p_value,
                l2_distance: report.l2_distance,
                max_min_ratio: histogram.max_min_ratio(),
            });
        }
    }
    emit(&args.output, Format::Text, &rows)?;
    if !args.assert {
        return Ok(());
    }
    for row in &rows {
        if !(SIGNIFICANCE..=1.0 - SIGNIFICANCE).contains(&row.p_value) {
            return Err(Failure::Assertion(format!(
                "{} p_value {} outside [{SIGNIFICANCE}, {}] with {} keys",
                row.algorithm,
                row.p_value,
                1.0 - SIGNIFICANCE,
                row.keys
            )));
        }
    }
    for flip in rows.iter().filter(|r| r.algorithm == Algorithm::FlipHash) {
        let jump = rows
            .iter()
            .find(|r| r.algorithm == Algorithm::JumpHash && r.keys == flip.keys);
        if let Some(jump) = jump {
            if flip.l2_distance > 2.0 * jump.l2_distance {
                return Err(Failure::Assertion(format!(
                    "fliphash l2_distance {} exceeds twice jumphash's {} with {} keys",
                    flip.l2_distance, jump.l2_distance, flip.keys
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RemapRow {
    algorithm: Algorithm,
    n_before: u64,
    n_after: u64,
    keys: u64,
    moved: u64,
    moved_fraction: f64,
    expected_fraction: f64,
    z_score: f64,
    illegal_moves: u64,
}

impl fmt::Display for RemapRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={}->{} moved={}/{} fraction={:.6} expected={:.6} z={:.3} illegal={}",
            self.algorithm,
            self.n_before,
            self.n_after,
            self.moved,
            self.keys,
            self.moved_fraction,
            self.expected_fraction,
            self.z_score,
            self.illegal_moves
        )
    }
}

fn remap_cmd(args: RemapArgs) -> Outcome {
    if args.n_min == 0 || args.n_min >= args.n_max {
        return Err(usage(format!(
            "need 1 <= --n-min < --n-max, got {} and {}",
            args.n_min, args.n_max
        )));
    }
    check_domain(&args.algorithm, args.n_max)?;
    let keys = KeyStream::take_vec(args.seed, key_count(args.keys)?);
    let mut rows = Vec::new();
    for &algorithm in &args.algorithm {
        let hasher = algorithm
            .hasher(0, args.m)
            .map_err(|e| usage(e.to_string()))?;
        for report in scan_monotonicity(&hasher, args.n_min, args.n_max, &keys)? {
            rows.push(RemapRow {
                algorithm,
                n_before: report.n_before,
                n_after: report.n_after,
                keys: report.keys,
                moved: report.moved,
                moved_fraction: report.moved_fraction,
                expected_fraction: report.expected_moved_fraction(),
                z_score: report.binomial_z_score(),
                illegal_moves: report.illegal_moves,
            });
        }
    }
    emit(&args.output, Format::Text, &rows)?;
    if args.assert {
        let illegal: u64 = rows.iter().map(|r| r.illegal_moves).sum();
        if illegal > 0 {
            let first = rows.iter().find(|r| r.illegal_moves > 0).unwrap();
            return Err(Failure::Assertion(format!(
                "{illegal} illegal moves, first at {} n={}->{}",
                first.algorithm, first.n_before, first.n_after
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct IndependenceRow {
    algorithm: Algorithm,
    axis: Axis,
    /// The two seeds, or the two range exponents.
    first: u64,
    second: u64,
    samples: u64,
    powered: bool,
    chi_squared: Option<f64>,
    degrees_of_freedom: Option<u64>,
    p_value: Option<f64>,
    min_expected_count: Option<f64>,
}

impl fmt::Display for IndependenceRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} axis={} first={} second={} samples={} ",
            self.algorithm,
            self.axis.to_possible_value().unwrap().get_name(),
            self.first,
            self.second,
            self.samples
        )?;
        match (self.chi_squared, self.degrees_of_freedom, self.p_value) {
            (Some(chi), Some(dof), Some(p)) => {
                write!(f, "chi_squared={chi:.4} dof={dof} p_value={p:.6}")
            }
            _ => write!(
                f,
                "underpowered min_expected_count={:.3}",
                self.min_expected_count.unwrap_or(0.0)
            ),
        }
    }
}

fn independence_cmd(args: IndependenceArgs) -> Outcome {
    let keys_needed = key_count(args.keys)?;
    let (first, second) = match args.axis {
        Axis::Seeds => {
            if args.from.is_some() || args.to.is_some() {
                return Err(usage("--from and --to conflict with --axis seeds"));
            }
            let other = args.other_seed.unwrap_or(2);
            if other == args.seed {
                return Err(usage("--seed and --other-seed must differ"));
            }
            (args.seed, other)
        }
        Axis::Ranges | Axis::Spread => {
            if args.other_seed.is_some() || args.n.is_some() {
                return Err(usage("--other-seed and --n only apply to --axis seeds"));
            }
            let from = args.from.unwrap_or(9);
            let to = args.to.unwrap_or(from + 1);
            (u64::from(from), u64::from(to))
        }
    };
    let n = resource_count(args.n.unwrap_or(16))?;
    check_domain(&args.algorithm, n.get())?;
    let exponent = |r: u64| RangeExponent::new(r as u32).map_err(|e| usage(e.to_string()));
    let keys = KeyStream::take_vec(args.key_seed, keys_needed);
    let mut rows = Vec::new();
    for &algorithm in &args.algorithm {
        let hasher = algorithm
            .hasher(args.seed, args.m)
            .map_err(|e| usage(e.to_string()))?;
        let (samples, report) = match args.axis {
            Axis::Spread => {
                let spread = remap_spread(&hasher, exponent(first)?, exponent(second)?, &keys)
                    .map_err(|e| usage(e.to_string()))?;
                (spread.remapped, Some(spread.report))
            }
            axis => {
                let axis = if axis == Axis::Seeds {
                    IndependenceAxis::Seeds { first, second, n }
                } else {
                    IndependenceAxis::Ranges {
                        from: exponent(first)?,
                        to: exponent(second)?,
                    }
                };
                match independence_check(&hasher, axis, &keys).map_err(|e| usage(e.to_string()))? {
                    IndependenceOutcome::Tested { samples, report } => (samples, Some(report)),
                    IndependenceOutcome::Underpowered {
                        samples,
                        min_expected_count,
                    } => {
                        rows.push(IndependenceRow {
                            algorithm,
                            axis: args.axis,
                            first,
                            second,
                            samples,
                            powered: false,
                            chi_squared: None,
                            degrees_of_freedom: None,
                            p_value: None,
                            min_expected_count: Some(min_expected_count),
                        });
                        continue;
                    }
                }
            }
        };
        let report = report.expect("tested outcome");
        rows.push(IndependenceRow {
            algorithm,
            axis: args.axis,
            first,
            second,
            samples,
            powered: true,
            chi_squared: Some(report.chi_squared),
            degrees_of_freedom: Some(report.degrees_of_freedom),
            p_value: Some(report.p_value),
            min_expected_count: None,
        });
    }
    emit(&args.output, Format::Text, &rows)?;
    if args.assert {
        for row in &rows {
            match row.p_value {
                None => {
                    return Err(Failure::Assertion(format!(
                        "{} test is underpowered; raise --keys",
                        row.algorithm
                    )))
                }
                Some(p) if !(SIGNIFICANCE..=1.0 - SIGNIFICANCE).contains(&p) => {
                    return Err(Failure::Assertion(format!(
                        "{} p_value {p} outside [{SIGNIFICANCE}, {}]",
                        row.algorithm,
                        1.0 - SIGNIFICANCE
                    )))
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

fn timing_config(args: &TimingArgs) -> Result<BenchConfig, Failure> {
    let size = |v: u64, flag: &str| {
        usize::try_from(v).map_err(|_| usage(format!("{flag} {v} is too large")))
    };
    Ok(BenchConfig {
        keys_per_point: size(args.keys, "--keys")?,
        batch_size: size(args.batch, "--batch")?,
        warmup_iterations: size(args.warmup, "--warmup")?,
        seed: args.seed,
        ..BenchConfig::default()
    })
}

fn finish_timing(args: &TimingArgs, rows: &[crate::BenchRow]) -> Outcome {
    emit(&args.output, Format::Csv, rows)?;
    if !args.assert {
        return Ok(());
    }
    let checks = timing_shape(rows);
    if checks.is_empty() {
        return Err(usage(
            "--assert needs resource counts that some timing check covers",
        ));
    }
    for check in &checks {
        eprintln!("{check}");
    }
    match checks.iter().find(|c| !c.holds) {
        Some(ShapeCheck { name, detail, .. }) => {
            Err(Failure::Assertion(format!("{name}: {detail}")))
        }
        None => Ok(()),
    }
}

fn bench_cmd(args: BenchArgs) -> Outcome {
    let mut config = BenchConfig {
        algorithms: args.algorithm.clone(),
        ..timing_config(&args.timing)?
    };
    if !args.n.is_empty() {
        config.n_values = args
            .n
            .iter()
            .map(|&n| resource_count(n))
            .collect::<Result<_, _>>()?;
    }
    let rows = bench(&config).map_err(|e| match e {
        BenchError::Config(msg) => usage(msg),
        e => e.into(),
    })?;
    finish_timing(&args.timing, &rows)
}

fn sawtooth_cmd(args: SawtoothArgs) -> Outcome {
    let config = timing_config(&args.timing)?;
    let rows = sawtooth_scan(args.n_min, args.n_max, &config).map_err(|e| match e {
        BenchError::Config(msg) => usage(msg),
        e => e.into(),
    })?;
    finish_timing(&args.timing, &rows)
}
