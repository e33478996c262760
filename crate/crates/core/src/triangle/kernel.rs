//! Interchangeable differencing kernels, selectable by name.
//!
//! Every kernel answers the same question (index of the first terminal row,
//! gap row = 1) and must agree exactly; they differ only in memory traffic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{first_bad, is_good, oracle, GapRow, PREFIX_LEN};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Termination {
    pub g: usize,
    pub prefix: Vec<u16>,
}

pub trait DiffKernel: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Differences `row` until it is terminal and returns the row index.
    /// Rows `1..=max_steps` are examined. `row` is scratch space: its contents
    /// afterwards are unspecified.
    fn run(&self, row: &mut GapRow, max_steps: usize) -> Result<Termination>;
}

fn prefix(values: &[u16]) -> Vec<u16> {
    values[..values.len().min(PREFIX_LEN)].to_vec()
}

/// One full pass per row, shrinking the vector each time.
///
/// A prefix of good values stays good after a step (minus its last element),
/// so the terminal scan resumes where the previous one failed.
#[derive(Debug, Default, Clone, Copy)]
pub struct InPlaceKernel;

impl DiffKernel for InPlaceKernel {
    fn name(&self) -> &'static str {
        "inplace"
    }

    fn run(&self, row: &mut GapRow, max_steps: usize) -> Result<Termination> {
        let leading = row.leading_one_allowed;
        let v = &mut row.values;
        let mut clean = 0;
        for k in 1..=max_steps {
            match first_bad(v, clean, leading) {
                None => {
                    return Ok(Termination {
                        g: k,
                        prefix: prefix(v),
                    })
                }
                Some(pos) => clean = pos,
            }
            let n = v.len();
            for i in 0..n - 1 {
                v[i] = v[i].abs_diff(v[i + 1]);
            }
            v.truncate(n - 1);
            clean = clean.saturating_sub(1);
        }
        Err(Error::StepBudgetExhausted { max_steps })
    }
}

/// Skewed tiling: a chunk of `tile` positions is advanced `depth` rows while
/// it sits in L1, then the next chunk picks up where the previous one left
/// each row. Terminality is tracked per row with an OR over `v & !2`.
#[derive(Debug, Clone, Copy)]
pub struct TiledKernel {
    pub tile: usize,
    pub depth: usize,
}

impl Default for TiledKernel {
    fn default() -> Self {
        TiledKernel {
            tile: 8 * 1024,
            depth: 64,
        }
    }
}

/// `w[i] = |w[i] - w[i + 1]|` for all but the last position; returns the OR
/// of `new & !2` over the written values.
#[inline]
fn diff_span(w: &mut [u16]) -> u16 {
    let n = w.len();
    let mut acc = 0u16;
    for i in 0..n.saturating_sub(1) {
        let d = w[i].abs_diff(w[i + 1]);
        w[i] = d;
        acc |= d & !2;
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn diff_span_avx2(w: &mut [u16]) -> u16 {
    diff_span(w)
}

fn diff_span_fast(w: &mut [u16]) -> u16 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            return unsafe { diff_span_avx2(w) };
        }
    }
    diff_span(w)
}

impl DiffKernel for TiledKernel {
    fn name(&self) -> &'static str {
        "tiled"
    }

    fn run(&self, row: &mut GapRow, max_steps: usize) -> Result<Termination> {
        if max_steps == 0 {
            return Err(Error::StepBudgetExhausted { max_steps });
        }
        let leading = row.leading_one_allowed;
        let v = &mut row.values;
        if first_bad(v, 0, leading).is_none() {
            return Ok(Termination {
                g: 1,
                prefix: prefix(v),
            });
        }

        let depth = self.depth.max(1);
        let mut bad = vec![0u16; depth + 1];
        let mut prefixes: Vec<Vec<u16>> = vec![Vec::new(); depth + 1];
        // `v[..n]` holds row `k`.
        let mut k = 1;
        let mut n = v.len();
        while k < max_steps {
            let steps = depth.min(max_steps - k).min(n);
            let tile = self.tile.max(steps + PREFIX_LEN);
            bad[..=steps].fill(0);

            let mut s = 0;
            while s < n {
                let e = (s + tile).min(n);
                let last = e == n;
                for t in 1..=steps {
                    let lo = if s == 0 { 0 } else { s - t };
                    let hi = if last { n - t } else { e - t };
                    if lo >= hi {
                        continue;
                    }
                    // Writes v[lo..hi] from v[lo..=hi].
                    if s == 0 {
                        let d0 = v[0].abs_diff(v[1]);
                        v[0] = d0;
                        let mut acc = diff_span_fast(&mut v[1..=hi]);
                        if !is_good(d0, 0, leading) {
                            acc |= 1;
                        }
                        bad[t] |= acc;
                        prefixes[t].clear();
                        prefixes[t].extend_from_slice(&v[..hi.min(PREFIX_LEN)]);
                    } else {
                        bad[t] |= diff_span_fast(&mut v[lo..=hi]);
                    }
                }
                s = e;
            }

            if let Some(t) = (1..=steps).find(|&t| bad[t] == 0) {
                return Ok(Termination {
                    g: k + t,
                    prefix: std::mem::take(&mut prefixes[t]),
                });
            }
            k += steps;
            n -= steps;
        }
        Err(Error::StepBudgetExhausted { max_steps })
    }
}

/// Allocates a fresh row per step and rescans it from scratch. This is the
/// oracle's row machinery exposed as a kernel.
#[derive(Debug, Default, Clone, Copy)]
pub struct NaiveKernel;

impl DiffKernel for NaiveKernel {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn run(&self, row: &mut GapRow, max_steps: usize) -> Result<Termination> {
        let first: Vec<u64> = row.values.iter().map(|&v| v as u64).collect();
        oracle::first_terminal(first, row.leading_one_allowed, max_steps)
            .map(|(g, p)| Termination {
                g,
                prefix: p.into_iter().map(|v| v as u16).collect(),
            })
            .ok_or(Error::StepBudgetExhausted { max_steps })
    }
}

/// Kernels by name.
#[derive(Debug, Clone)]
pub struct KernelRegistry {
    kernels: BTreeMap<&'static str, Arc<dyn DiffKernel>>,
}

impl KernelRegistry {
    pub const DEFAULT: &'static str = "tiled";

    pub fn empty() -> Self {
        KernelRegistry {
            kernels: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(TiledKernel::default()));
        reg.register(Arc::new(InPlaceKernel));
        reg.register(Arc::new(NaiveKernel));
        reg
    }

    /// Adds a kernel, replacing any previous one with the same name.
    pub fn register(&mut self, kernel: Arc<dyn DiffKernel>) {
        self.kernels.insert(kernel.name(), kernel);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn DiffKernel>> {
        self.kernels
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "kernel",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.kernels.keys().copied().collect()
    }
}
