//! Odd-only segmented sieve of Eratosthenes.
//!
//! Each segment is a bitmap over odd integers `seg_lo, seg_lo + 2, ...`; a set
//! bit means "not yet crossed off". Base primes up to `sqrt(hi)` come from a
//! process-wide table that is built once per size and then only read.

use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest exclusive range end the sieve accepts.
pub const SIEVE_LIMIT: u64 = 10_000_000_000_000_000;

/// Default bitmap size per segment (bytes). Fits in a typical L2.
pub const DEFAULT_SEGMENT_BYTES: usize = 256 * 1024;

static BASE_PRIMES: OnceLock<Mutex<Arc<Vec<u32>>>> = OnceLock::new();

/// Odd primes `<= limit`, shared. The returned table may extend past `limit`.
pub(crate) fn base_primes(limit: u32) -> Arc<Vec<u32>> {
    let cell = BASE_PRIMES.get_or_init(|| Mutex::new(Arc::new(Vec::new())));
    let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
    let covered = guard.last().copied().unwrap_or(0);
    if covered >= limit && !guard.is_empty() {
        return Arc::clone(&guard);
    }
    // Grow geometrically so a run of increasing requests stays linear.
    let target = limit.max(covered.saturating_mul(2)).max(1 << 16);
    let table = Arc::new(simple_odd_sieve(target));
    *guard = Arc::clone(&table);
    table
}

fn simple_odd_sieve(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    // index i <-> 2i + 1
    let mut composite = vec![false; limit / 2 + 1];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < composite.len() {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    (1..composite.len())
        .filter(|&i| !composite[i] && 2 * i < limit)
        .map(|i| (2 * i + 1) as u32)
        .collect()
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Streams the primes of `[lo, hi)` in ascending order, one segment at a time.
pub struct SegmentedSieve {
    hi: u64,
    /// Next odd number not yet covered by a segment.
    next_odd: u64,
    emit_two: bool,
    base: Arc<Vec<u32>>,
    bits: Vec<u64>,
    segment_odds: u64,
    buf: Vec<u64>,
    pos: usize,
}

impl SegmentedSieve {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        Self::with_segment_bytes(lo, hi, DEFAULT_SEGMENT_BYTES)
    }

    pub fn with_segment_bytes(lo: u64, hi: u64, segment_bytes: usize) -> Result<Self> {
        if hi > SIEVE_LIMIT {
            return Err(Error::RangeTooLarge {
                hi,
                limit: SIEVE_LIMIT,
            });
        }
        let lo = lo.max(2);
        if lo >= hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        if segment_bytes < 8 {
            return Err(Error::InvalidConfig(format!(
                "segment size {segment_bytes} bytes is below one word"
            )));
        }
        let words = segment_bytes / 8;
        let root = isqrt(hi - 1) as u32;
        Ok(SegmentedSieve {
            hi,
            next_odd: if lo.is_multiple_of(2) { lo + 1 } else { lo }.max(3),
            emit_two: lo <= 2,
            base: base_primes(root),
            bits: vec![0; words],
            segment_odds: words as u64 * 64,
            buf: Vec::new(),
            pos: 0,
        })
    }

    /// Refills `buf`; false once the range is exhausted.
    fn fill(&mut self) -> bool {
        self.buf.clear();
        self.pos = 0;
        if self.emit_two {
            self.emit_two = false;
            self.buf.push(2);
        }
        while self.buf.is_empty() && self.next_odd < self.hi {
            self.sieve_segment();
        }
        !self.buf.is_empty()
    }

    fn sieve_segment(&mut self) {
        let seg_lo = self.next_odd;
        let span_odds = (self.hi - seg_lo).div_ceil(2).min(self.segment_odds);
        let seg_end = seg_lo + 2 * span_odds; // exclusive, odd
        let nwords = span_odds.div_ceil(64) as usize;
        let bits = &mut self.bits[..nwords];
        bits.fill(u64::MAX);
        if !span_odds.is_multiple_of(64) {
            bits[nwords - 1] = (1u64 << (span_odds % 64)) - 1;
        }

        for &p in self.base.iter() {
            let p = p as u64;
            let sq = p * p;
            if sq >= seg_end {
                break;
            }
            let mut start = if sq >= seg_lo {
                sq
            } else {
                let r = seg_lo % p;
                if r == 0 {
                    seg_lo
                } else {
                    seg_lo + (p - r)
                }
            };
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - seg_lo) / 2) as usize;
            let end = span_odds as usize;
            let step = p as usize;
            while idx < end {
                bits[idx >> 6] &= !(1u64 << (idx & 63));
                idx += step;
            }
        }
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as u64;
                self.buf.push(seg_lo + 2 * (w as u64 * 64 + b));
                word &= word - 1;
            }
        }
        self.next_odd = seg_end;
    }
}

impl Iterator for SegmentedSieve {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos == self.buf.len() && !self.fill() {
            return None;
        }
        let p = self.buf[self.pos];
        self.pos += 1;
        Some(p)
    }
}
