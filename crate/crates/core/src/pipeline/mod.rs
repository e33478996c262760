//! Slicing the prime sequence into overlapping blocks and running the
//! triangle over each block independently.
//!
//! Slice `i` holds the primes with ordinals `[i * body, i * body + body + overlap)`
//! (truncated at the end of the range). Row `k` of a slice is a contiguous
//! piece of row `k` of the whole sequence, and for `k <= overlap` that piece
//! still covers the slice body. So once every slice reaches a terminal row in
//! fewer than `overlap` steps, the whole range is terminal at the largest of
//! those step counts.

mod log;
mod run;

pub use self::log::{read_log, ResultLog, LOG_HEADER};
pub use self::run::{run_verification, Progress, RunConfig, VerificationReport};

use crate::error::{Error, Result};
use crate::triangle::{self, format_ratio, DiffKernel, GapRow};

pub const DEFAULT_BODY: usize = 10_000_000;
pub const DEFAULT_OVERLAP: usize = 4_000;
/// Smallest overlap accepted unless the caller opts out.
pub const MIN_OVERLAP: usize = 3_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceSpec {
    pub index: usize,
    /// Ordinal of the slice's first prime; ordinal 0 is the prime 2.
    pub start_ordinal: u64,
    pub body_count: usize,
    pub overlap_count: usize,
}

impl SliceSpec {
    /// Primes the slice holds when the sequence has `total_primes` elements.
    pub fn len_within(&self, total_primes: u64) -> usize {
        let want = (self.body_count + self.overlap_count) as u64;
        want.min(total_primes.saturating_sub(self.start_ordinal)) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceResult {
    pub index: usize,
    pub first_prime: u64,
    pub last_prime: u64,
    pub prime_count: usize,
    pub g: usize,
    /// Largest gap in the slice, overlap included. 0 only for a one-prime slice.
    pub m: u16,
}

impl SliceResult {
    pub fn r(&self) -> f64 {
        triangle::ratio(self.g, self.m)
    }

    pub fn r_text(&self) -> String {
        format_ratio(self.g, self.m)
    }
}

/// `ceil(total / body)` slices covering every ordinal exactly once by body.
pub fn plan_slices(total_primes: u64, body_count: usize, overlap_count: usize) -> Vec<SliceSpec> {
    assert!(body_count >= 1, "body_count must be positive");
    let n = total_primes.div_ceil(body_count as u64);
    (0..n)
        .map(|i| SliceSpec {
            index: i as usize,
            start_ordinal: i * body_count as u64,
            body_count,
            overlap_count,
        })
        .collect()
}

/// Runs one slice. The first slice (starting at 2) may keep its leading 1.
///
/// The step budget is `overlap - 1`: a slice that needs `overlap` steps or
/// more no longer covers its own body and is reported as overlap exhaustion.
pub fn process_slice(
    spec: &SliceSpec,
    primes: &[u64],
    kernel: &dyn DiffKernel,
) -> Result<SliceResult> {
    let (first_prime, last_prime) = match (primes.first(), primes.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::EmptyInput),
    };
    let mut result = SliceResult {
        index: spec.index,
        first_prime,
        last_prime,
        prime_count: primes.len(),
        g: 1,
        m: 0,
    };
    if primes.len() == 1 {
        // Empty gap row: terminal at row 1.
        return Ok(result);
    }
    let row = triangle::gaps_from_primes(primes, spec.index == 0 && first_prime == 2)?;
    result.m = triangle::row_max(&row);
    result.g = run_row(row, spec, kernel)?;
    Ok(result)
}

fn run_row(mut row: GapRow, spec: &SliceSpec, kernel: &dyn DiffKernel) -> Result<usize> {
    let budget = spec.overlap_count.saturating_sub(1);
    match kernel.run(&mut row, budget) {
        Ok(t) => Ok(t.g),
        Err(Error::StepBudgetExhausted { .. }) => Err(Error::OverlapExhausted {
            index: spec.index,
            overlap: spec.overlap_count,
        }),
        Err(e) => Err(e),
    }
}

/// Outcome of [`validate_stitching`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StitchReport {
    pub violations: Vec<String>,
}

impl StitchReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that a complete, ordered result list certifies the whole range:
/// every `g < overlap`, indices run 0, 1, 2, ... and each slice starts inside
/// the previous one (no uncovered primes between slices).
pub fn validate_stitching(results: &[SliceResult], overlap_count: usize) -> StitchReport {
    let mut report = StitchReport::default();
    for (i, r) in results.iter().enumerate() {
        if r.index != i {
            report
                .violations
                .push(format!("position {i} holds slice {}", r.index));
        }
        if r.g >= overlap_count {
            report.violations.push(format!(
                "slice {}: g = {} is not below overlap {overlap_count}",
                r.index, r.g
            ));
        }
    }
    for w in results.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.first_prime <= a.first_prime || b.first_prime > a.last_prime {
            report.violations.push(format!(
                "slices {} and {} do not abut: [{}, {}] then [{}, {}]",
                a.index, b.index, a.first_prime, a.last_prime, b.first_prime, b.last_prime
            ));
        }
    }
    report
}

/// Difference operations needed for `total_primes` at `mean_g` rows each.
pub fn estimate_work(total_primes: u64, mean_g: f64) -> f64 {
    total_primes as f64 * mean_g
}
