use std::fmt;

use serde::Serialize;

use super::{uniformity, Histogram, UniformityReport};
use crate::error::{Error, Result};
use crate::fliphash::{RangeExponent, ResourceCount};
use crate::statlab::chi_squared_survival;
use crate::{RangeHash, Reseed};

/// Smallest expected cell count for which the chi-squared approximation is trusted.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

const MAX_CELLS: u64 = 1 << 22;

/// What varies between the two hashes whose joint outcomes are tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "axis", rename_all = "kebab-case")]
pub enum IndependenceAxis {
    /// Same key and range, two seeds.
    Seeds {
        first: u64,
        second: u64,
        n: ResourceCount,
    },
    /// Same key and seed, ranges `2^from` and `2^to`, keeping only keys whose
    /// second hash lands in `[2^from, 2^to)`.
    Ranges {
        from: RangeExponent,
        to: RangeExponent,
    },
}

/// Joint counts of `(first, second)` outcomes over rectangular value ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    row_start: u64,
    rows: usize,
    col_start: u64,
    cols: usize,
    cells: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    /// Table over first values `row_start..row_start+rows` and second values
    /// `col_start..col_start+cols`.
    pub fn new(row_start: u64, rows: usize, col_start: u64, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidAxis(
                "a contingency table needs at least two rows and two columns",
            ));
        }
        let cells = rows as u64 * cols as u64;
        if cells > MAX_CELLS {
            return Err(Error::TooManyBuckets {
                n: cells,
                limit: MAX_CELLS,
            });
        }
        Ok(Self {
            row_start,
            rows,
            col_start,
            cols,
            cells: vec![0; cells as usize],
            total: 0,
        })
    }

    pub fn record(&mut self, key: u64, first: u64, second: u64) -> Result<()> {
        let row = first.wrapping_sub(self.row_start);
        let col = second.wrapping_sub(self.col_start);
        if row >= self.rows as u64 {
            return Err(Error::OutputOutOfRange {
                key,
                value: first,
                n: self.row_start + self.rows as u64,
            });
        }
        if col >= self.cols as u64 {
            return Err(Error::OutputOutOfRange {
                key,
                value: second,
                n: self.col_start + self.cols as u64,
            });
        }
        self.cells[row as usize * self.cols + col as usize] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.cells[row * self.cols + col]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.cells
            .chunks(self.cols)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.cols];
        for row in self.cells.chunks(self.cols) {
            for (sum, &count) in sums.iter_mut().zip(row) {
                *sum += count;
            }
        }
        sums
    }
}

/// Result of an independence test; an underpowered table is never a pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum IndependenceOutcome {
    Tested {
        samples: u64,
        #[serde(flatten)]
        report: UniformityReport,
    },
    Underpowered {
        samples: u64,
        min_expected_count: f64,
    },
}

impl IndependenceOutcome {
    pub fn report(&self) -> Option<&UniformityReport> {
        match self {
            Self::Tested { report, .. } => Some(report),
            Self::Underpowered { .. } => None,
        }
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.report().is_some_and(|r| r.passes(alpha))
    }
}

impl fmt::Display for IndependenceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tested { samples, report } => {
                write!(f, "outcome=tested samples={samples} {report}")
            }
            Self::Underpowered {
                samples,
                min_expected_count,
            } => write!(
                f,
                "outcome=underpowered samples={samples} min_expected_count={min_expected_count:.3}"
            ),
        }
    }
}

/// Pearson chi-squared test of independence between the rows and columns of `table`.
pub fn chi_squared_independence(table: &ContingencyTable) -> IndependenceOutcome {
    let samples = table.total();
    let total = samples as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let min_expected = match (rows.iter().min(), cols.iter().min()) {
        (Some(&r), Some(&c)) if samples > 0 => r as f64 * c as f64 / total,
        _ => 0.0,
    };
    if min_expected < MIN_EXPECTED_COUNT {
        return IndependenceOutcome::Underpowered {
            samples,
            min_expected_count: min_expected,
        };
    }
    let mut chi_squared = 0.0;
    let mut squared_distance = 0.0;
    for (i, &row) in rows.iter().enumerate() {
        for (j, &col) in cols.iter().enumerate() {
            let expected = row as f64 * col as f64 / total;
            let observed = table.get(i, j) as f64;
            chi_squared += (observed - expected).powi(2) / expected;
            squared_distance += ((observed - expected) / total).powi(2);
        }
    }
    let degrees_of_freedom = (rows.len() as u64 - 1) * (cols.len() as u64 - 1);
    IndependenceOutcome::Tested {
        samples,
        report: UniformityReport {
            chi_squared,
            degrees_of_freedom,
            p_value: chi_squared_survival(chi_squared, degrees_of_freedom),
            l2_distance: squared_distance.sqrt(),
        },
    }
}

/// Tests whether two hashes of the same keys along `axis` behave as independent.
pub fn independence_check<H: RangeHash + Reseed>(
    hasher: &H,
    axis: IndependenceAxis,
    keys: &[u64],
) -> Result<IndependenceOutcome> {
    if keys.is_empty() {
        return Err(Error::NoKeys);
    }
    let table = match axis {
        IndependenceAxis::Seeds { first, second, n } => {
            let buckets = usize::try_from(n.get()).unwrap_or(usize::MAX);
            let mut table = ContingencyTable::new(0, buckets, 0, buckets)?;
            let (a, b) = (hasher.reseeded(first), hasher.reseeded(second));
            for &key in keys {
                table.record(key, a.hash_range(key, n), b.hash_range(key, n))?;
            }
            table
        }
        IndependenceAxis::Ranges { from, to } => {
            let (small, large) = range_pair(from, to)?;
            let old = small.get();
            let mut table =
                ContingencyTable::new(0, old as usize, old, (large.get() - old) as usize)?;
            for &key in keys {
                let second = hasher.hash_range(key, large);
                if second >= old {
                    table.record(key, hasher.hash_range(key, small), second)?;
                }
            }
            table
        }
    };
    Ok(chi_squared_independence(&table))
}

fn range_pair(from: RangeExponent, to: RangeExponent) -> Result<(ResourceCount, ResourceCount)> {
    if from.get() == 0 || from >= to {
        return Err(Error::InvalidAxis("ranges need 1 <= from < to"));
    }
    if to.get() > 26 {
        return Err(Error::TooManyBuckets {
            n: 1u64.checked_shl(to.get()).unwrap_or(u64::MAX),
            limit: 1 << 26,
        });
    }
    Ok((
        ResourceCount::new(1 << from.get())?,
        ResourceCount::new(1 << to.get())?,
    ))
}

/// Distribution of the keys that move when the range grows from `2^from` to
/// `2^to`, over the values `[2^from, 2^to)` they move to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemapSpread {
    pub remapped: u64,
    pub histogram: Histogram,
    pub report: UniformityReport,
}

/// Tabulates where keys remapped by growing the range from `2^from` to `2^to` land.
pub fn remap_spread<H: RangeHash + ?Sized>(
    hasher: &H,
    from: RangeExponent,
    to: RangeExponent,
    keys: &[u64],
) -> Result<RemapSpread> {
    let (small, large) = range_pair(from, to)?;
    let old = small.get();
    let mut histogram = Histogram::new(ResourceCount::new(large.get() - old)?)?;
    for &key in keys {
        let value = hasher.hash_range(key, large);
        if value >= old {
            histogram.record(key, value - old)?;
        }
    }
    let report = uniformity(&histogram)?;
    Ok(RemapSpread {
        remapped: histogram.total(),
        histogram,
        report,
    })
}
