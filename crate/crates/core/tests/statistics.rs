use fliphash_core::statlab::{
    build_histogram, remap_spread, scan_monotonicity, uniformity, SIGNIFICANCE,
};
use fliphash_core::{FlipHasher, JumpHasher, KeyStream, RangeExponent, ResourceCount};

fn n(n: u64) -> ResourceCount {
    ResourceCount::new(n).unwrap()
}

#[test]
fn remap_spread_uniform_at_every_doubling() {
    let keys = KeyStream::take_vec(31, 200_000);
    let hasher = FlipHasher::new();
    for from in 1..=12 {
        let spread = remap_spread(
            &hasher,
            RangeExponent::new(from).unwrap(),
            RangeExponent::new(from + 1).unwrap(),
            &keys,
        )
        .unwrap();
        assert!(
            spread.report.passes(SIGNIFICANCE),
            "2^{from}: {}",
            spread.report
        );
        let half = spread.remapped as f64 / keys.len() as f64;
        assert!((half - 0.5).abs() < 0.005, "2^{from}: {half}");
    }
}

#[test]
fn pow2_and_general_agree_on_powers_of_two() {
    let hasher = FlipHasher::new();
    for bits in [3, 7, 10] {
        let count = n(1 << bits);
        let exponent = RangeExponent::new(bits).unwrap();
        let keys = || KeyStream::new(32).take(100_000);
        let general = build_histogram(|k| hasher.hash(k, count), count, keys()).unwrap();
        let pow2 = build_histogram(|k| hasher.hash_pow2(k, exponent), count, keys()).unwrap();
        assert_eq!(general, pow2);
        assert_eq!(uniformity(&general).unwrap(), uniformity(&pow2).unwrap());
    }
}

#[test]
fn l2_distance_shrinks_with_root_of_sample_size() {
    let hasher = FlipHasher::new();
    let count = n(1000);
    let l2 = |keys: usize| {
        let h = build_histogram(
            |k| hasher.hash(k, count),
            count,
            KeyStream::new(33).take(keys),
        );
        uniformity(&h.unwrap()).unwrap().l2_distance
    };
    let (small, large) = (l2(10_000), l2(1_000_000));
    // Expected sqrt((n - 1) / (n * keys)); a 100x larger sample gives 10x less distance.
    let ratio = small / large;
    assert!((8.0..12.5).contains(&ratio), "{ratio}");
    let expected = (999.0 / (1000.0 * 1e6f64)).sqrt();
    assert!(
        (large / expected - 1.0).abs() < 0.1,
        "{large} vs {expected}"
    );
}

#[test]
fn both_hashers_move_minimally_across_scan() {
    let keys = KeyStream::take_vec(34, 100_000);
    for reports in [
        scan_monotonicity(&FlipHasher::new(), 1, 300, &keys).unwrap(),
        scan_monotonicity(&JumpHasher::new(), 1, 300, &keys).unwrap(),
    ] {
        for report in reports {
            assert_eq!(report.illegal_moves, 0);
            assert!(report.binomial_z_score().abs() < 5.0, "{report}");
        }
    }
}
