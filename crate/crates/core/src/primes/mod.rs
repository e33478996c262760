//! Prime generation: a segmented sieve for ranges up to 10^16 and
//! deterministic point queries for the rest of the 64-bit range.

mod primality;
mod sieve;
mod stepping;

use std::fmt;

pub use primality::is_prime;
pub use sieve::{SegmentedSieve, DEFAULT_SEGMENT_BYTES, SIEVE_LIMIT};
pub use stepping::PresievedStepper;

use crate::error::{Error, Result};

/// The primes of `[lo, hi)`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBlock {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

impl PrimeBlock {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn starts_at_two(&self) -> bool {
        self.primes.first() == Some(&2)
    }
}

impl std::ops::Deref for PrimeBlock {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.primes
    }
}

/// All primes in `[lo, hi)`. `hi` may not exceed [`SIEVE_LIMIT`].
pub fn primes_in_range(lo: u64, hi: u64) -> Result<PrimeBlock> {
    let primes = SegmentedSieve::new(lo, hi)?.collect();
    Ok(PrimeBlock { lo, hi, primes })
}

/// Smallest prime `> n`.
pub fn next_prime(n: u64) -> Result<u64> {
    if n < 2 {
        return Ok(2);
    }
    let mut c = if n.is_multiple_of(2) {
        n + 1
    } else {
        n.checked_add(2).ok_or(Error::Overflow(n))?
    };
    loop {
        if is_prime(c) {
            return Ok(c);
        }
        c = c.checked_add(2).ok_or(Error::Overflow(n))?;
    }
}

/// Largest prime `< n`.
pub fn prev_prime(n: u64) -> Result<u64> {
    if n <= 2 {
        return Err(Error::NoPrimeBelow(n));
    }
    if n == 3 {
        return Ok(2);
    }
    let mut c = if n.is_multiple_of(2) { n - 1 } else { n - 2 };
    while !is_prime(c) {
        c -= 2;
    }
    Ok(c)
}

/// Where a window of consecutive primes is drawn from.
pub trait PrimeSource: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// The first `count` primes `> start`, ascending.
    fn forward(&self, start: u64, count: usize) -> Result<Vec<u64>>;

    /// The last `count` primes `<= end`, ascending. Fewer than `count` only if
    /// the sequence runs into 2.
    fn backward(&self, end: u64, count: usize) -> Result<Vec<u64>>;
}

/// Chunked segmented sieving; limited to [`SIEVE_LIMIT`].
#[derive(Debug, Default, Clone, Copy)]
pub struct SieveSource;

/// Rough span (in integers) holding `count` primes near `x`.
fn span_estimate(x: u64, count: usize) -> u64 {
    let ln = (x.max(16) as f64).ln();
    (count as f64 * ln * 1.2) as u64 + 1024
}

impl PrimeSource for SieveSource {
    fn name(&self) -> &'static str {
        "sieve"
    }

    fn forward(&self, start: u64, count: usize) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(count);
        let mut lo = start.saturating_add(1);
        while out.len() < count {
            let want = count - out.len();
            let hi = lo.saturating_add(span_estimate(lo, want)).min(SIEVE_LIMIT);
            if lo >= hi {
                return Err(Error::RangeTooLarge {
                    hi: lo.saturating_add(span_estimate(lo, want)),
                    limit: SIEVE_LIMIT,
                });
            }
            out.extend(SegmentedSieve::new(lo, hi)?.take(want));
            lo = hi;
        }
        Ok(out)
    }

    fn backward(&self, end: u64, count: usize) -> Result<Vec<u64>> {
        if end.saturating_add(1) > SIEVE_LIMIT {
            return Err(Error::RangeTooLarge {
                hi: end.saturating_add(1),
                limit: SIEVE_LIMIT,
            });
        }
        // Chunks collected right to left, then stitched.
        let mut chunks: Vec<Vec<u64>> = Vec::new();
        let mut have = 0;
        let mut hi = end + 1;
        while have < count && hi > 2 {
            let want = count - have;
            let lo = hi.saturating_sub(span_estimate(hi, want)).max(2);
            let mut chunk: Vec<u64> = SegmentedSieve::new(lo, hi)?.collect();
            if chunk.len() > want {
                chunk.drain(..chunk.len() - want);
            }
            have += chunk.len();
            chunks.push(chunk);
            hi = lo;
        }
        Ok(chunks.into_iter().rev().flatten().collect())
    }
}

/// Picks the sieve when the window fits below [`SIEVE_LIMIT`], else steps.
#[derive(Debug, Default, Clone, Copy)]
pub struct AutoSource;

impl PrimeSource for AutoSource {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn forward(&self, start: u64, count: usize) -> Result<Vec<u64>> {
        let reach = start.saturating_add(2 * span_estimate(start, count));
        if reach < SIEVE_LIMIT {
            SieveSource.forward(start, count)
        } else {
            PresievedStepper::default().forward(start, count)
        }
    }

    fn backward(&self, end: u64, count: usize) -> Result<Vec<u64>> {
        if end < SIEVE_LIMIT - 1 {
            SieveSource.backward(end, count)
        } else {
            PresievedStepper::default().backward(end, count)
        }
    }
}

pub const PRIME_SOURCES: [&str; 3] = ["auto", "sieve", "stepping"];

/// Looks up a prime source by name.
pub fn prime_source(name: &str) -> Result<Box<dyn PrimeSource>> {
    match name {
        "auto" => Ok(Box::new(AutoSource)),
        "sieve" => Ok(Box::new(SieveSource)),
        "stepping" => Ok(Box::new(PresievedStepper::default())),
        _ => Err(Error::UnknownStrategy {
            kind: "prime source",
            name: name.to_string(),
            available: PRIME_SOURCES.join(", "),
        }),
    }
}

/// The `before` primes `<= p` followed by the `after` primes `> p`.
pub fn window_before_after(p: u64, before: usize, after: usize) -> Result<PrimeBlock> {
    window_with(&AutoSource, p, before, after)
}

pub fn window_with(
    source: &dyn PrimeSource,
    p: u64,
    before: usize,
    after: usize,
) -> Result<PrimeBlock> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut primes = source.backward(p, before)?;
    if primes.len() < before {
        return Err(Error::InsufficientPrimes {
            p,
            requested: before,
            available: primes.len(),
        });
    }
    primes.extend(source.forward(p, after)?);
    let lo = primes.first().copied().unwrap_or(p);
    let hi = primes.last().map_or(p + 1, |&q| q + 1);
    Ok(PrimeBlock { lo, hi, primes })
}
