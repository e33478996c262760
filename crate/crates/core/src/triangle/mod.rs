//! Gap rows and the iterated absolute-difference computation.
//!
//! Row numbering: the gap row is row 1, so an input that is already terminal
//! reports `g = 1`. An empty row counts as terminal.

mod kernel;
mod oracle;

pub use kernel::{
    DiffKernel, InPlaceKernel, KernelRegistry, NaiveKernel, Termination, TiledKernel,
};
pub use oracle::full_triangle_oracle;

use crate::error::{Error, Result};

/// Gaps at or above this value do not fit the row representation.
pub const GAP_LIMIT: u64 = 32_768;

/// How many leading values of the terminal row an outcome keeps.
pub const PREFIX_LEN: usize = 8;

/// One row of the triangle below the primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRow {
    pub values: Vec<u16>,
    /// Set only when the underlying primes start at 2: the row may then lead with a 1.
    pub leading_one_allowed: bool,
}

impl GapRow {
    pub fn new(values: Vec<u16>, leading_one_allowed: bool) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v as u64 >= GAP_LIMIT) {
            return Err(Error::GapOverflow {
                gap: v as u64,
                lower_prime: 0,
            });
        }
        Ok(GapRow {
            values,
            leading_one_allowed,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Result of running a row to its first terminal row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleOutcome {
    /// Index of the first terminal row (gap row = 1).
    pub g: usize,
    /// Largest value of the gap row.
    pub m: u16,
    pub terminal_row_prefix: Vec<u16>,
}

impl TriangleOutcome {
    pub fn r(&self) -> f64 {
        ratio(self.g, self.m)
    }
}

/// `g / m`, or 0 for the degenerate `m = 0`.
pub fn ratio(g: usize, m: u16) -> f64 {
    if m == 0 {
        0.0
    } else {
        g as f64 / m as f64
    }
}

/// `g / m` truncated (not rounded) to four decimals, e.g. 693/766 -> "0.9046".
pub fn format_ratio(g: usize, m: u16) -> String {
    if m == 0 {
        return "0.0000".to_string();
    }
    let q = g as u128 * 10_000 / m as u128;
    format!("{}.{:04}", q / 10_000, q % 10_000)
}

/// Consecutive differences of an increasing prime list.
pub fn gaps_from_primes(primes: &[u64], starts_at_two: bool) -> Result<GapRow> {
    if primes.len() < 2 {
        return Err(Error::RowExhausted(primes.len()));
    }
    let mut values = Vec::with_capacity(primes.len() - 1);
    for (i, w) in primes.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NotIncreasing(i + 1));
        }
        let gap = w[1] - w[0];
        if gap >= GAP_LIMIT {
            return Err(Error::GapOverflow {
                gap,
                lower_prime: w[0],
            });
        }
        values.push(gap as u16);
    }
    Ok(GapRow {
        values,
        leading_one_allowed: starts_at_two,
    })
}

/// Replaces `row` by its absolute differences; the row loses its last element.
pub fn abs_diff_step(mut row: GapRow) -> Result<GapRow> {
    let n = row.values.len();
    if n < 2 {
        return Err(Error::RowExhausted(n));
    }
    let v = &mut row.values;
    for i in 0..n - 1 {
        v[i] = v[i].abs_diff(v[i + 1]);
    }
    v.truncate(n - 1);
    Ok(row)
}

#[inline]
pub(crate) fn is_good(v: u16, pos: usize, leading_one_allowed: bool) -> bool {
    v & !2 == 0 || (pos == 0 && leading_one_allowed && v == 1)
}

/// Position of the first value at or after `from` that keeps the row from
/// being terminal.
pub(crate) fn first_bad(values: &[u16], from: usize, leading_one_allowed: bool) -> Option<usize> {
    if from == 0 {
        if let Some(&v) = values.first() {
            if !is_good(v, 0, leading_one_allowed) {
                return Some(0);
            }
        }
        return values
            .iter()
            .skip(1)
            .position(|&v| v & !2 != 0)
            .map(|p| p + 1);
    }
    values[from.min(values.len())..]
        .iter()
        .position(|&v| v & !2 != 0)
        .map(|p| p + from)
}

/// All values in {0, 2}, except a leading 1 when the row comes from primes
/// starting at 2. Empty rows are terminal.
pub fn is_terminal(row: &GapRow) -> bool {
    first_bad(&row.values, 0, row.leading_one_allowed).is_none()
}

pub fn row_max(row: &GapRow) -> u16 {
    row.values.iter().copied().max().unwrap_or(0)
}

/// Runs a working copy of `row` with the default kernel.
pub fn steps_to_terminal(row: &GapRow, max_steps: usize) -> Result<TriangleOutcome> {
    steps_to_terminal_with(&TiledKernel::default(), row, max_steps)
}

pub fn steps_to_terminal_with(
    kernel: &dyn DiffKernel,
    row: &GapRow,
    max_steps: usize,
) -> Result<TriangleOutcome> {
    let m = row_max(row);
    let mut work = row.clone();
    let t = kernel.run(&mut work, max_steps)?;
    Ok(TriangleOutcome {
        g: t.g,
        m,
        terminal_row_prefix: t.prefix,
    })
}
