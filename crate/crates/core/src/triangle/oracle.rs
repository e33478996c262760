//! Brute-force reference: every row is a freshly allocated vector of `u64`
//! built straight from the one above, and terminality is rechecked from
//! scratch. Shares nothing with the kernels' in-place arithmetic.

use super::{TriangleOutcome, GAP_LIMIT, PREFIX_LEN};
use crate::error::{Error, Result};

fn terminal(row: &[u64], leading_one_allowed: bool) -> bool {
    row.iter()
        .enumerate()
        .all(|(i, &v)| v == 0 || v == 2 || (i == 0 && leading_one_allowed && v == 1))
}

/// Index (first row = 1) and prefix of the first terminal row within `max_steps`.
pub(crate) fn first_terminal(
    first_row: Vec<u64>,
    leading_one_allowed: bool,
    max_steps: usize,
) -> Option<(usize, Vec<u64>)> {
    let mut row = first_row;
    for k in 1..=max_steps {
        if terminal(&row, leading_one_allowed) {
            row.truncate(PREFIX_LEN);
            return Some((k, row));
        }
        row = row.windows(2).map(|w| w[0].abs_diff(w[1])).collect();
    }
    None
}

/// The full triangle over `primes`, run until a terminal row.
///
/// Unbounded: a finite list always ends in an empty, vacuously terminal row.
pub fn full_triangle_oracle(primes: &[u64], starts_at_two: bool) -> Result<TriangleOutcome> {
    if primes.len() < 2 {
        return Err(Error::RowExhausted(primes.len()));
    }
    let mut gaps = Vec::with_capacity(primes.len() - 1);
    for i in 1..primes.len() {
        if primes[i] <= primes[i - 1] {
            return Err(Error::NotIncreasing(i));
        }
        gaps.push(primes[i] - primes[i - 1]);
    }
    let (argmax, &m) = gaps
        .iter()
        .enumerate()
        .max_by_key(|&(i, &g)| (g, std::cmp::Reverse(i)))
        .expect("at least one gap");
    if m >= GAP_LIMIT {
        return Err(Error::GapOverflow {
            gap: m,
            lower_prime: primes[argmax],
        });
    }
    let budget = gaps.len() + 1;
    let (g, prefix) = first_terminal(gaps, starts_at_two, budget).expect("empty row is terminal");
    Ok(TriangleOutcome {
        g,
        m: m as u16,
        terminal_row_prefix: prefix.into_iter().map(|v| v as u16).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let out = full_triangle_oracle(&[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31], true).unwrap();
        assert_eq!((out.g, out.m), (3, 6));
        let out = full_triangle_oracle(&[3, 5, 7], false).unwrap();
        assert_eq!((out.g, out.m), (1, 2));
        let out = full_triangle_oracle(&[2, 3], true).unwrap();
        assert_eq!((out.g, out.m), (1, 1));
        // Without the leading-one allowance a row starting with 1 never
        // qualifies until it runs out.
        let out = full_triangle_oracle(&[2, 3, 5], false).unwrap();
        assert_eq!(out.g, 3);
    }
}
