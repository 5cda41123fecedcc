//! FlipHash over an arbitrary [`HashFamily`].
//!
//! For a power-of-two range `[0, 2^r)` the key is hashed once and masked to
//! `r` bits, giving `a`. The bits of `a` below its most significant set bit
//! are then flipped with a second hash seeded by that bit position. For any
//! other range the power-of-two result above `n` is kept when it fits, and
//! otherwise a bounded number of fresh draws decide between a value in the
//! upper half of the range and the result for the previous power of two.

use std::fmt;
use std::num::NonZeroU64;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hash_family::DEFAULT_MAX_RETRIES;
use crate::hash_family::{sigma_unchecked, BitMixer, HashFamily, MAX_RETRY_INDEX};
use crate::{RangeHash, Reseed};

/// Number of resources `n`, with `1 <= n <= 2^64 - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ResourceCount(NonZeroU64);

impl ResourceCount {
    pub const ONE: Self = Self(NonZeroU64::MIN);

    pub const fn new(n: u64) -> Result<Self> {
        match NonZeroU64::new(n) {
            Some(n) => Ok(Self(n)),
            None => Err(Error::ZeroResources),
        }
    }

    #[inline(always)]
    pub const fn get(self) -> u64 {
        self.0.get()
    }

    /// Smallest `r` with `n <= 2^r`.
    #[inline(always)]
    pub const fn exponent(self) -> RangeExponent {
        RangeExponent(u64::BITS - (self.0.get() - 1).leading_zeros())
    }
}

impl TryFrom<u64> for ResourceCount {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        Self::new(n)
    }
}

impl fmt::Display for ResourceCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Exponent `r` of a power-of-two range `[0, 2^r)`, with `r <= 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RangeExponent(u32);

impl RangeExponent {
    pub const fn new(r: u32) -> Result<Self> {
        if r > u64::BITS {
            Err(Error::RangeExponentTooLarge(r))
        } else {
            Ok(Self(r))
        }
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// `2^r - 1`, which is all ones for `r = 64`.
    #[inline(always)]
    pub const fn mask(self) -> u64 {
        low_mask(self.0)
    }
}

#[inline(always)]
const fn low_mask(bits: u32) -> u64 {
    match 1u64.checked_shl(bits) {
        Some(pow) => pow - 1,
        None => u64::MAX,
    }
}

/// Which exit of the general algorithm produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ReturnPath {
    /// The power-of-two hash already fell below `n`.
    #[serde(rename = "A")]
    Direct,
    /// A draw fell in the lower half; the previous power of two decides.
    #[serde(rename = "B")]
    LowerHalf,
    /// A draw fell in `[2^(r-1), n)` and is returned as is.
    #[serde(rename = "C")]
    Draw,
    /// Every draw landed at or above `n`; the previous power of two decides.
    #[serde(rename = "D")]
    Exhausted,
}

impl ReturnPath {
    pub const fn label(self) -> char {
        match self {
            Self::Direct => 'A',
            Self::LowerHalf => 'B',
            Self::Draw => 'C',
            Self::Exhausted => 'D',
        }
    }
}

impl fmt::Display for ReturnPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Intermediates of one power-of-two evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pow2Trace {
    pub r: u32,
    /// First hash masked to `r` bits.
    pub a: u64,
    /// Position of the highest set bit of `a`, or 0 when `a` is 0.
    pub b: u32,
    /// Second hash masked to `b` bits.
    pub c: u64,
    pub value: u64,
}

/// Every intermediate of a general evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipTrace {
    pub key: u64,
    pub n: u64,
    pub r: u32,
    /// Power-of-two evaluation over `[0, 2^r)`; its value is `d`.
    pub direct: Pow2Trace,
    /// Draws `e_1, e_2, ...` in order.
    pub draws: Vec<u64>,
    /// Power-of-two evaluation over `[0, 2^(r-1))` on paths B and D.
    pub fallback: Option<Pow2Trace>,
    pub path: ReturnPath,
    pub value: u64,
}

impl FlipTrace {
    pub fn d(&self) -> u64 {
        self.direct.value
    }
}

impl fmt::Display for FlipTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "key={} n={} r={} a={} b={} c={} d={}",
            self.key,
            self.n,
            self.r,
            self.direct.a,
            self.direct.b,
            self.direct.c,
            self.direct.value
        )?;
        f.write_str(" e=[")?;
        for (i, e) in self.draws.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")?;
        if let Some(fallback) = &self.fallback {
            write!(f, " fallback={}", fallback.value)?;
        }
        write!(f, " path={} value={}", self.path, self.value)
    }
}

trait Observer {
    fn pow2(&mut self, _step: Pow2Trace) {}
    fn draw(&mut self, _e: u64) {}
}

impl Observer for () {}

#[derive(Default)]
struct Recorder {
    steps: Vec<Pow2Trace>,
    draws: Vec<u64>,
}

impl Observer for Recorder {
    fn pow2(&mut self, step: Pow2Trace) {
        self.steps.push(step);
    }

    fn draw(&mut self, e: u64) {
        self.draws.push(e);
    }
}

/// FlipHash with a configured family, seed and retry bound `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipHasher<H = BitMixer> {
    family: H,
    seed: u64,
    max_retries: u32,
}

impl FlipHasher<BitMixer> {
    pub const fn new() -> Self {
        Self::with_seed(0)
    }

    pub const fn with_seed(seed: u64) -> Self {
        Self {
            family: BitMixer,
            seed,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

impl Default for FlipHasher<BitMixer> {
    fn default() -> Self {
        Self::new()
    }
}

impl<H: HashFamily> FlipHasher<H> {
    pub fn with_family(family: H, seed: u64, max_retries: u32) -> Result<Self> {
        if !(1..=MAX_RETRY_INDEX).contains(&max_retries) {
            return Err(Error::InvalidRetryBound(max_retries));
        }
        Ok(Self {
            family,
            seed,
            max_retries,
        })
    }

    /// Same family and seed with a different retry bound.
    pub fn with_max_retries(self, max_retries: u32) -> Result<Self> {
        Self::with_family(self.family, self.seed, max_retries)
    }

    pub fn family(&self) -> &H {
        &self.family
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_retries(&self) -> u32 {
        self.max_retries
    }

    /// Hashes `key` into `[0, 2^r)`.
    #[inline]
    pub fn hash_pow2(&self, key: u64, r: RangeExponent) -> u64 {
        let first = self.draw(key, 0, 0);
        self.flip(key, first, r.get(), &mut ())
    }

    /// Power-of-two evaluation with its intermediates.
    pub fn hash_pow2_traced(&self, key: u64, r: RangeExponent) -> Pow2Trace {
        let mut recorder = Recorder::default();
        let first = self.draw(key, 0, 0);
        self.flip(key, first, r.get(), &mut recorder);
        recorder.steps[0]
    }

    /// Hashes `key` into `[0, n)`.
    #[inline]
    pub fn hash(&self, key: u64, n: ResourceCount) -> u64 {
        self.evaluate(key, n.get(), &mut ()).0
    }

    /// Like [`hash`](Self::hash), recording every intermediate.
    pub fn hash_traced(&self, key: u64, n: ResourceCount) -> FlipTrace {
        let mut recorder = Recorder::default();
        let (value, path) = self.evaluate(key, n.get(), &mut recorder);
        let mut steps = recorder.steps.into_iter();
        let direct = steps.next().expect("direct evaluation always recorded");
        FlipTrace {
            key,
            n: n.get(),
            r: direct.r,
            direct,
            draws: recorder.draws,
            fallback: steps.next(),
            path,
            value,
        }
    }

    // The seed enters both sigma and the key. Small seeds make seeded sigma
    // values coincide across seeds (sigma_1(3, 0) == sigma_2(0, 0)); the key
    // offset keeps those draws apart.
    #[inline(always)]
    fn draw(&self, key: u64, bit: u32, retry: u32) -> u64 {
        self.family
            .hash(key ^ self.seed, sigma_unchecked(bit, retry, self.seed))
    }

    // `first` is h_key(sigma(0, 0)); it is shared by every power of two.
    #[inline(always)]
    fn flip<O: Observer>(&self, key: u64, first: u64, r: u32, observer: &mut O) -> u64 {
        let a = first & low_mask(r);
        let b = a.checked_ilog2().unwrap_or(0);
        // The mask of c is empty for b = 0, so the second hash is skipped.
        let c = if b == 0 {
            0
        } else {
            self.draw(key, b, 0) & low_mask(b)
        };
        let value = a ^ c;
        observer.pow2(Pow2Trace { r, a, b, c, value });
        value
    }

    #[inline(always)]
    fn evaluate<O: Observer>(&self, key: u64, n: u64, observer: &mut O) -> (u64, ReturnPath) {
        let r = u64::BITS - (n - 1).leading_zeros();
        let first = self.draw(key, 0, 0);
        let d = self.flip(key, first, r, observer);
        if d < n {
            return (d, ReturnPath::Direct);
        }
        // d >= n is only possible when n < 2^r, hence r >= 1.
        debug_assert!(r >= 1);
        let mask = low_mask(r);
        let half = 1u64 << (r - 1);
        for retry in 1..=self.max_retries {
            let e = self.draw(key, r - 1, retry) & mask;
            observer.draw(e);
            if e < half {
                return (
                    self.flip(key, first, r - 1, observer),
                    ReturnPath::LowerHalf,
                );
            } else if e < n {
                return (e, ReturnPath::Draw);
            }
        }
        (
            self.flip(key, first, r - 1, observer),
            ReturnPath::Exhausted,
        )
    }
}

impl<H: HashFamily> RangeHash for FlipHasher<H> {
    #[inline]
    fn hash_range(&self, key: u64, n: ResourceCount) -> u64 {
        self.hash(key, n)
    }
}

impl<H: HashFamily + Clone> Reseed for FlipHasher<H> {
    fn reseeded(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::hash_family::{sigma, StubFamily};
    use crate::keys::KeyStream;

    const X: u64 = 0xF11B;

    fn s(bit: u32, retry: u32) -> crate::SigmaElement {
        sigma(bit, retry, 0).unwrap()
    }

    // h_x(sigma(0,0)) = 11, h_x(sigma(1,0)) = 5, h_x(sigma(3,0)) = 13.
    fn pow2_stub() -> StubFamily {
        StubFamily::new()
            .with(X, s(0, 0), 11)
            .with(X, s(1, 0), 5)
            .with(X, s(3, 0), 13)
    }

    // The pow2 stub plus h_x(sigma(3,i)) = 12, 11, 15, 6 for i = 1..4.
    fn retry_stub() -> StubFamily {
        [12, 11, 15, 6]
            .into_iter()
            .zip(1..)
            .fold(pow2_stub(), |stub, (value, retry)| {
                stub.with(X, s(3, retry), value)
            })
    }

    fn r(r: u32) -> RangeExponent {
        RangeExponent::new(r).unwrap()
    }

    fn n(n: u64) -> ResourceCount {
        ResourceCount::new(n).unwrap()
    }

    #[test]
    fn exponent_is_ceiling_log2() {
        let cases = [
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (8, 3),
            (9, 4),
            (1 << 40, 40),
        ];
        for (count, expected) in cases {
            assert_eq!(n(count).exponent().get(), expected, "n = {count}");
        }
        assert_eq!(n(u64::MAX).exponent().get(), 64);
        assert_eq!(n((1 << 63) + 1).exponent().get(), 64);
        assert_eq!(r(64).mask(), u64::MAX);
        assert_eq!(r(0).mask(), 0);
        assert_eq!(r(3).mask(), 7);
    }

    #[test]
    fn contract_violations() {
        assert_eq!(ResourceCount::new(0), Err(Error::ZeroResources));
        assert_eq!(
            RangeExponent::new(65),
            Err(Error::RangeExponentTooLarge(65))
        );
        assert_eq!(
            FlipHasher::with_family(BitMixer, 0, 0),
            Err(Error::InvalidRetryBound(0))
        );
        assert!(FlipHasher::new().with_max_retries(1 << 16).is_err());
        assert!(FlipHasher::new().with_max_retries((1 << 16) - 1).is_ok());
    }

    #[test]
    fn golden_pow2_trace() {
        let hasher = FlipHasher::with_family(pow2_stub(), 0, 64).unwrap();
        let expected = [
            (0, 0, 0, 0),
            (1, 0, 0, 1),
            (3, 1, 1, 2),
            (3, 1, 1, 2),
            (11, 3, 5, 14),
        ];
        for (exp, (a, b, c, value)) in (0..).zip(expected) {
            let trace = hasher.hash_pow2_traced(X, r(exp));
            assert_eq!(
                (trace.a, trace.b, trace.c, trace.value),
                (a, b, c, value),
                "r = {exp}"
            );
            assert_eq!(hasher.hash_pow2(X, r(exp)), value);
        }
    }

    #[test]
    fn golden_column() {
        let hasher = FlipHasher::with_family(retry_stub(), 0, 64).unwrap();
        let expected = [0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 11, 12, 12, 14, 14];
        for (count, value) in (1..).zip(expected) {
            assert_eq!(hasher.hash(X, n(count)), value, "n = {count}");
        }
    }

    #[test]
    fn golden_traces() {
        let hasher = FlipHasher::with_family(retry_stub(), 0, 64).unwrap();

        let t = hasher.hash_traced(X, n(12));
        assert_eq!((t.r, t.d(), t.draws.as_slice()), (4, 14, &[12, 11][..]));
        assert_eq!((t.path, t.value), (ReturnPath::Draw, 11));

        for count in 9..=11 {
            let t = hasher.hash_traced(X, n(count));
            assert_eq!(t.draws, [12, 11, 15, 6]);
            assert_eq!((t.path, t.value), (ReturnPath::LowerHalf, 2));
            assert_eq!(t.fallback.map(|f| f.value), Some(2));
        }

        for count in [13, 14] {
            let t = hasher.hash_traced(X, n(count));
            assert_eq!(
                (t.draws.as_slice(), t.path, t.value),
                (&[12][..], ReturnPath::Draw, 12)
            );
        }

        for count in [15, 16] {
            let t = hasher.hash_traced(X, n(count));
            assert!(t.draws.is_empty());
            assert_eq!((t.path, t.value), (ReturnPath::Direct, 14));
        }

        let t = hasher.hash_traced(X, n(1));
        assert_eq!((t.r, t.path, t.value), (0, ReturnPath::Direct, 0));
    }

    #[test]
    fn golden_with_fewer_retries_exhausts() {
        let hasher = FlipHasher::with_family(retry_stub(), 0, 3).unwrap();
        let t = hasher.hash_traced(X, n(9));
        assert_eq!(t.draws, [12, 11, 15]);
        assert_eq!((t.path, t.value), (ReturnPath::Exhausted, 2));
    }

    #[test]
    fn single_resource_is_zero() {
        let hasher = FlipHasher::new();
        for key in KeyStream::new(3).take(1000).chain([0, u64::MAX]) {
            assert_eq!(hasher.hash(key, ResourceCount::ONE), 0);
            assert_eq!(hasher.hash_pow2(key, r(0)), 0);
        }
    }

    #[test]
    fn full_width_ranges() {
        let hasher = FlipHasher::with_seed(5);
        for key in KeyStream::new(4).take(1000) {
            let v = hasher.hash(key, n(u64::MAX));
            assert!(v < u64::MAX);
            let _ = hasher.hash_pow2(key, r(64));
            let v = hasher.hash(key, n((1 << 63) + 1));
            assert!(v <= 1 << 63);
        }
    }

    #[test]
    fn retries_are_bounded_by_m() {
        let hasher = FlipHasher::new().with_max_retries(4).unwrap();
        let mut exhausted = 0;
        for key in KeyStream::new(11).take(20_000) {
            // Just above a power of two each draw misses with probability ~1/2.
            let t = hasher.hash_traced(key, n(65));
            assert!(t.draws.len() <= 4);
            exhausted += (t.path == ReturnPath::Exhausted) as u32;
        }
        assert!(exhausted > 0);
    }

    #[test]
    fn monotone_exhaustive_small_ranges() {
        let hasher = FlipHasher::with_seed(0x5EED);
        for key in KeyStream::new(8).take(2_000) {
            let mut previous = 0;
            for count in 2..=1024 {
                let v = hasher.hash(key, n(count));
                assert!(v == previous || v == count - 1, "key {key} n {count}");
                previous = v;
            }
        }
    }

    fn any_count() -> impl Strategy<Value = u64> {
        prop_oneof![
            4 => 1u64..5000,
            1 => 1u64..=u64::MAX,
        ]
    }

    proptest! {
        #[test]
        fn hash_is_in_range(key: u64, seed: u64, count in any_count()) {
            let hasher = FlipHasher::with_seed(seed);
            prop_assert!(hasher.hash(key, n(count)) < count);
        }

        #[test]
        fn pow2_is_in_range_and_monotone(key: u64, seed: u64, exp in 0u32..64) {
            let hasher = FlipHasher::with_seed(seed);
            let low = hasher.hash_pow2(key, r(exp));
            let high = hasher.hash_pow2(key, r(exp + 1));
            prop_assert!(low <= r(exp).mask());
            prop_assert!(high == low || high >= 1 << exp);
        }

        #[test]
        fn monotone_in_n(key: u64, seed: u64, count in 1u64..u64::MAX) {
            let hasher = FlipHasher::with_seed(seed);
            let before = hasher.hash(key, n(count));
            let after = hasher.hash(key, n(count + 1));
            prop_assert!(after == before || after == count);
        }

        #[test]
        fn powers_of_two_take_direct_path(key: u64, seed: u64, exp in 0u32..64) {
            let hasher = FlipHasher::with_seed(seed);
            let t = hasher.hash_traced(key, n(1 << exp));
            prop_assert_eq!(t.path, ReturnPath::Direct);
            prop_assert_eq!(t.value, hasher.hash_pow2(key, r(exp)));
        }

        #[test]
        fn traced_matches_plain(key: u64, seed: u64, count in any_count(), m in 1u32..80) {
            let hasher = FlipHasher::with_seed(seed).with_max_retries(m).unwrap();
            let t = hasher.hash_traced(key, n(count));
            prop_assert_eq!(t.value, hasher.hash(key, n(count)));
            prop_assert!(t.draws.len() <= m as usize);
            prop_assert_eq!(t.fallback.is_some(), matches!(t.path, ReturnPath::LowerHalf | ReturnPath::Exhausted));
        }

        #[test]
        fn flip_preserves_leading_bit(key: u64, seed: u64, exp in 0u32..=64) {
            let t = FlipHasher::with_seed(seed).hash_pow2_traced(key, r(exp));
            prop_assert_eq!(t.value.checked_ilog2(), t.a.checked_ilog2());
            prop_assert!(t.c < 1u64.checked_shl(t.b).unwrap_or(0).max(1));
        }

        #[test]
        fn reseeding_changes_only_the_seed(seed: u64, other: u64) {
            let hasher = FlipHasher::with_seed(seed).with_max_retries(9).unwrap();
            let reseeded = hasher.reseeded(other);
            prop_assert_eq!(reseeded.seed(), other);
            prop_assert_eq!(reseeded.max_retries(), 9);
        }
    }
}
