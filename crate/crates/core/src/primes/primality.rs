//! Deterministic Miller-Rabin for the full 64-bit range.
//!
//! Arithmetic runs in Montgomery form with `R = 2^64`, so each modular
//! multiplication is two widening multiplies and a conditional add instead of
//! a 128-bit division.

/// Sinclair's seven bases: no strong pseudoprime to all of them below 2^64.
const WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

#[derive(Clone, Copy)]
struct Montgomery {
    n: u64,
    n_inv: u64,
    r2: u64,
    one: u64,
}

impl Montgomery {
    fn new(n: u64) -> Self {
        debug_assert!(n % 2 == 1 && n > 1);
        // Newton iteration doubles the number of correct low bits each round.
        let mut inv = n;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let one = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((one as u128 * one as u128) % n as u128) as u64;
        Montgomery {
            n,
            n_inv: inv,
            r2,
            one,
        }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let lo = t as u64;
        let hi = (t >> 64) as u64;
        let m = lo.wrapping_mul(self.n_inv);
        let mn_hi = ((m as u128 * self.n as u128) >> 64) as u64;
        let (r, borrow) = hi.overflowing_sub(mn_hi);
        if borrow {
            r.wrapping_add(self.n)
        } else {
            r
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    fn encode(&self, a: u64) -> u64 {
        self.mul(a % self.n, self.r2)
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = self.one;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// Strong probable-prime test of odd `n > 47` against every witness.
fn miller_rabin(n: u64) -> bool {
    let mont = Montgomery::new(n);
    let minus_one = n - mont.one;
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;

    'witness: for &a in &WITNESSES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mont.pow(mont.encode(a), d);
        if x == mont.one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// True iff `n` is prime. Deterministic for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 53 * 53 {
        return true;
    }
    miller_rabin(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn agrees_with_trial_division_below_100k() {
        for n in 0..100_000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // Smallest strong pseudoprimes to the first k prime bases (OEIS A014233).
        for n in [
            2047u64,
            1_373_653,
            25_326_001,
            3_215_031_751,
            2_152_302_898_747,
            3_474_749_660_383,
            341_550_071_728_321,
            3_825_123_056_546_413_051,
        ] {
            assert!(!is_prime(n), "n = {n}");
        }
        // Carmichael numbers.
        for n in [561u64, 41041, 825_265, 321_197_185, 5_394_826_801] {
            assert!(!is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn record_gap_endpoints() {
        assert!(is_prime(19_581_334_192_423));
        assert!(is_prime(19_581_334_193_189));
        assert!(is_prime(218_209_405_436_543));
        assert!(is_prime(218_209_405_437_449));
        assert!(!is_prime(1));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn no_primes_inside_the_766_gap() {
        let p = 19_581_334_192_423u64;
        for k in 1..=382 {
            assert!(!is_prime(p + 2 * k), "p + {}", 2 * k);
        }
    }
}
