use proptest::prelude::*;

use gilbreath::pipeline::{plan_slices, process_slice, SliceResult};
use gilbreath::primes::{is_prime, next_prime, prev_prime, primes_in_range};
use gilbreath::stats::{histogram, summarize};
use gilbreath::triangle::{
    abs_diff_step, full_triangle_oracle, gaps_from_primes, is_terminal, steps_to_terminal_with,
    GapRow, KernelRegistry, TiledKernel,
};
use gilbreath::Error;

/// Consecutive primes starting at the first prime `>= lo`.
fn primes_from(lo: u64, count: usize) -> Vec<u64> {
    let mut hi = lo + 64 + count as u64 * 32;
    loop {
        let p = primes_in_range(lo, hi).unwrap().primes;
        if p.len() >= count {
            return p[..count].to_vec();
        }
        hi *= 2;
    }
}

/// Blockwise run over `primes` as if they were the whole sequence.
fn blockwise(primes: &[u64], body: usize, overlap: usize) -> Result<Vec<SliceResult>, Error> {
    let kernel = TiledKernel { tile: 64, depth: 5 };
    plan_slices(primes.len() as u64, body, overlap)
        .iter()
        .map(|spec| {
            let start = spec.start_ordinal as usize;
            let end = start + spec.len_within(primes.len() as u64);
            process_slice(spec, &primes[start..end], &kernel)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rows_over_zero_and_two_stay_there(bits in prop::collection::vec(any::<bool>(), 2..200)) {
        let values: Vec<u16> = bits.iter().map(|&b| if b { 2 } else { 0 }).collect();
        let n = values.len();
        let row = GapRow::new(values, false).unwrap();
        prop_assert!(is_terminal(&row));
        let next = abs_diff_step(row).unwrap();
        prop_assert_eq!(next.len(), n - 1);
        prop_assert!(next.values.iter().all(|&v| v == 0 || v == 2));
    }

    #[test]
    fn each_step_shrinks_by_one(values in prop::collection::vec(0u16..32_768, 2..100)) {
        let n = values.len();
        let row = abs_diff_step(GapRow::new(values.clone(), false).unwrap()).unwrap();
        prop_assert_eq!(row.len(), n - 1);
        for i in 0..n - 1 {
            prop_assert_eq!(row.values[i], values[i].abs_diff(values[i + 1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernels_match_oracle(lo in 2u64..2_000_000, count in 2usize..1500) {
        let primes = primes_from(lo, count);
        let starts_at_two = primes[0] == 2;
        let want = full_triangle_oracle(&primes, starts_at_two).unwrap();
        let row = gaps_from_primes(&primes, starts_at_two).unwrap();
        let reg = KernelRegistry::builtin();
        for name in reg.names() {
            let got = steps_to_terminal_with(reg.get(name).unwrap().as_ref(), &row, count).unwrap();
            prop_assert_eq!(&got, &want, "kernel {}", name);
        }
        for (tile, depth) in [(1, 1), (7, 3), (100, 17)] {
            let got = steps_to_terminal_with(&TiledKernel { tile, depth }, &row, count).unwrap();
            prop_assert_eq!(got.g, want.g, "tile {} depth {}", tile, depth);
        }
    }

    /// Overlap above the true G reproduces it exactly; overlap at or below it
    /// is always reported, never answered wrongly.
    #[test]
    fn slices_stitch_or_report_exhaustion(
        lo in 2u64..1_000_000,
        count in 2usize..2500,
        body in 2usize..600,
        overlap in 1usize..200,
    ) {
        let primes = primes_from(lo, count);
        let g = full_triangle_oracle(&primes, primes[0] == 2).unwrap().g;
        match blockwise(&primes, body, overlap) {
            Ok(results) => {
                prop_assert!(overlap > g, "overlap {} <= g {} went unreported", overlap, g);
                prop_assert_eq!(results.iter().map(|r| r.g).max().unwrap(), g);
            }
            Err(Error::OverlapExhausted { .. }) => prop_assert!(overlap <= g),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    /// Changing primes far from a position cannot change the triangle there
    /// within fewer steps than the distance.
    #[test]
    fn influence_moves_one_position_per_row(
        values in prop::collection::vec(0u16..50, 20..120),
        tail in prop::collection::vec(0u16..50, 1..40),
        keep in 1usize..20,
    ) {
        let keep = keep.min(values.len() - 1);
        let mut other = values[..keep].to_vec();
        other.extend(&tail);
        let (mut a, mut b) = (values.clone(), other);
        // Row k (first row = 1) is determined on positions < keep - (k - 1).
        for k in 1..keep {
            for i in 0..keep - (k - 1) {
                prop_assert_eq!(a[i], b[i]);
            }
            if a.len() < 2 || b.len() < 2 {
                break;
            }
            a = a.windows(2).map(|w| w[0].abs_diff(w[1])).collect();
            b = b.windows(2).map(|w| w[0].abs_diff(w[1])).collect();
        }
    }

    #[test]
    fn sieve_agrees_with_miller_rabin(lo in 0u64..10_000_000_000, width in 1u64..3000) {
        let sieved = primes_in_range(lo, lo + width).unwrap().primes;
        let tested: Vec<u64> = (lo..lo + width).filter(|&n| is_prime(n)).collect();
        prop_assert_eq!(sieved, tested);
    }

    #[test]
    fn neighbours_bracket_every_number(n in 3u64..u64::MAX / 2) {
        let next = next_prime(n).unwrap();
        let prev = prev_prime(n).unwrap();
        prop_assert!(prev < n && n < next);
        prop_assert!(is_prime(prev) && is_prime(next));
        prop_assert_eq!(prev_prime(next).unwrap(), if is_prime(n) { n } else { prev });
        prop_assert_eq!(next_prime(prev).unwrap(), if is_prime(n) { n } else { next });
    }

    #[test]
    fn histogram_counts_every_value(
        values in prop::collection::vec(-50.0f64..50.0, 1..300),
        width in 0.01f64..5.0,
    ) {
        let h = histogram(&values, width).unwrap();
        prop_assert_eq!(h.total(), values.len() as u64);
        prop_assert!(h.lo <= values.iter().copied().fold(f64::INFINITY, f64::min));
        prop_assert!(h.counts[0] > 0 && *h.counts.last().unwrap() > 0);
    }

    #[test]
    fn summary_ignores_order(
        pairs in prop::collection::vec((1usize..2000, 1u16..1500), 1..60),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let results: Vec<SliceResult> = pairs
            .iter()
            .enumerate()
            .map(|(i, &(g, m))| SliceResult {
                index: i,
                first_prime: 2,
                last_prime: 3,
                prime_count: 2,
                g,
                m,
            })
            .collect();
        let mut shuffled = results.clone();
        shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        prop_assert_eq!(summarize(&results).unwrap(), summarize(&shuffled).unwrap());
    }
}
