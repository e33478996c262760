//! Neighbor-prime stepping for windows beyond the sieve limit.
//!
//! Candidates are taken a block at a time, struck by the small primes up to a
//! fixed bound, and the survivors go through deterministic Miller-Rabin. This
//! is much slower than the sieve per prime but needs no `sqrt(x)` base table,
//! so it reaches the top of the 64-bit range. Expect minutes per million
//! primes near 10^19.

use super::is_prime;
use super::sieve::base_primes;
use super::PrimeSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct PresievedStepper {
    /// Odd primes up to this bound are struck before Miller-Rabin.
    pub presieve_bound: u32,
    /// Odd candidates per block.
    pub block_odds: u64,
}

impl Default for PresievedStepper {
    fn default() -> Self {
        PresievedStepper {
            presieve_bound: 1 << 16,
            block_odds: 1 << 16,
        }
    }
}

impl PresievedStepper {
    /// Primes among the odd numbers `first, first + 2, ..` (`len` of them), ascending.
    fn block(&self, first: u64, len: u64, out: &mut Vec<u64>) {
        debug_assert!(first % 2 == 1);
        let mut alive = vec![true; len as usize];
        let base = base_primes(self.presieve_bound);
        let last = first + 2 * (len - 1);
        for &p in base.iter() {
            if p > self.presieve_bound {
                break;
            }
            let p = p as u64;
            let sq = p.saturating_mul(p);
            if sq > last {
                break;
            }
            // Offset from `first` of the first odd multiple of p worth striking.
            let mut off = if sq >= first {
                sq - first
            } else {
                (p - first % p) % p
            };
            if off % 2 == 1 {
                off += p;
            }
            let mut idx = off / 2;
            while idx < len {
                alive[idx as usize] = false;
                idx += p;
            }
        }
        for (i, ok) in alive.into_iter().enumerate() {
            let n = first + 2 * i as u64;
            if ok && n > 1 && is_prime(n) {
                out.push(n);
            }
        }
    }
}

impl PrimeSource for PresievedStepper {
    fn name(&self) -> &'static str {
        "stepping"
    }

    fn forward(&self, start: u64, count: usize) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return Ok(out);
        }
        if start < 2 {
            out.push(2);
        }
        let mut first = if start.is_multiple_of(2) {
            start + 1
        } else {
            start.saturating_add(2)
        }
        .max(3);
        let mut found = Vec::new();
        while out.len() < count {
            // u64::MAX is odd, so this counts the odd numbers left up to it.
            let len = ((u64::MAX - first) / 2 + 1).min(self.block_odds);
            found.clear();
            self.block(first, len, &mut found);
            out.extend(found.iter().take(count - out.len()));
            if out.len() < count {
                first = first.checked_add(2 * len).ok_or(Error::Overflow(start))?;
            }
        }
        Ok(out)
    }

    fn backward(&self, end: u64, count: usize) -> Result<Vec<u64>> {
        let mut chunks: Vec<Vec<u64>> = Vec::new();
        let mut have = 0;
        if end < 3 {
            if end == 2 && count > 0 {
                return Ok(vec![2]);
            }
            return Ok(Vec::new());
        }
        // Odd numbers in [3, top], walked downward a block at a time.
        let mut top = if end.is_multiple_of(2) { end - 1 } else { end };
        while have < count {
            let len = ((top - 3) / 2 + 1).min(self.block_odds);
            let first = top - 2 * (len - 1);
            let mut found = Vec::new();
            self.block(first, len, &mut found);
            if found.len() > count - have {
                found.drain(..found.len() - (count - have));
            }
            have += found.len();
            chunks.push(found);
            if first == 3 {
                if have < count {
                    chunks.push(vec![2]);
                }
                break;
            }
            top = first - 2;
        }
        Ok(chunks.into_iter().rev().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_windows() {
        let s = PresievedStepper {
            presieve_bound: 7,
            block_odds: 5,
        };
        assert_eq!(s.forward(0, 6).unwrap(), [2, 3, 5, 7, 11, 13]);
        assert_eq!(s.forward(13, 3).unwrap(), [17, 19, 23]);
        assert_eq!(
            s.backward(31, 11).unwrap(),
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
        );
        assert_eq!(s.backward(31, 20).unwrap().len(), 11);
        assert_eq!(s.backward(30, 2).unwrap(), [23, 29]);
    }

    #[test]
    fn top_of_the_range() {
        let s = PresievedStepper::default();
        let below = s.backward(u64::MAX, 2).unwrap();
        assert_eq!(
            below,
            [18_446_744_073_709_551_533, 18_446_744_073_709_551_557]
        );
        assert!(matches!(
            s.forward(18_446_744_073_709_551_557, 1),
            Err(Error::Overflow(_))
        ));
        assert_eq!(
            s.forward(18_446_744_073_709_551_533, 1).unwrap(),
            [18_446_744_073_709_551_557]
        );
    }
}
