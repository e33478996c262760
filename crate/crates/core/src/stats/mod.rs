//! Slice statistics: G and R summaries, histograms, max-gap scans.

mod svg;

pub use svg::{emit_svg, render_svg};

use crate::error::{Error, Result};
use crate::pipeline::SliceResult;
use crate::primes::SegmentedSieve;

/// Lower bound of the expected share of slices with R <= 1.
pub const SHARE_R_LE_1_FLOOR: f64 = 0.95;
/// Expected band for the mean of R.
pub const MEAN_R_CORRIDOR: (f64, f64) = (0.75, 0.95);
pub const DEFAULT_R_BIN_WIDTH: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    pub count: usize,
    pub mean_g: f64,
    pub mean_r: f64,
    /// Population standard deviation of R.
    pub stddev_r: f64,
    pub share_r_le_1: f64,
    pub max_r: f64,
}

/// Population statistics over `results`.
///
/// Slices with `m = 0` (a lone prime) carry no ratio and are left out of the
/// R figures. R <= 1 is decided on the integers (`g <= m`), so exact ties count.
pub fn summarize(results: &[SliceResult]) -> Result<StatsSummary> {
    if results.is_empty() {
        return Err(Error::EmptyInput);
    }
    let g_sum: u128 = results.iter().map(|r| r.g as u128).sum();
    let with_ratio: Vec<&SliceResult> = results.iter().filter(|r| r.m > 0).collect();
    // Sorted so the floating-point sums do not depend on input order.
    let mut rs: Vec<f64> = with_ratio.iter().map(|r| r.r()).collect();
    rs.sort_by(f64::total_cmp);

    let (mean_r, stddev_r, share, max_r) = if rs.is_empty() {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let n = rs.len() as f64;
        let mean = rs.iter().sum::<f64>() / n;
        let var = rs.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
        let le1 = with_ratio.iter().filter(|r| r.g <= r.m as usize).count();
        (mean, var.sqrt(), le1 as f64 / n, rs[rs.len() - 1])
    };
    Ok(StatsSummary {
        count: results.len(),
        mean_g: g_sum as f64 / results.len() as f64,
        mean_r,
        stddev_r,
        share_r_le_1: share,
        max_r,
    })
}

/// Soft checks against the expected R distribution; empty when inside the band.
pub fn corridor_warnings(s: &StatsSummary) -> Vec<String> {
    let mut out = Vec::new();
    if s.share_r_le_1 < SHARE_R_LE_1_FLOOR {
        out.push(format!(
            "share of R <= 1 is {}, expected at least {SHARE_R_LE_1_FLOOR}",
            fmt4(s.share_r_le_1)
        ));
    }
    let (lo, hi) = MEAN_R_CORRIDOR;
    if !(lo..=hi).contains(&s.mean_r) {
        out.push(format!(
            "mean R is {}, expected within [{lo}, {hi}]",
            fmt4(s.mean_r)
        ));
    }
    out
}

/// Four decimals, truncated (0.90469... prints as 0.9046).
pub fn fmt4(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let q = (x * 10_000.0 + 1e-7).floor();
    format!("{:.4}", q / 10_000.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    /// Lower edge of bin 0, a multiple of `bin_width`.
    pub lo: f64,
    first_unit: i64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn edge(&self, i: usize) -> f64 {
        (self.first_unit + i as i64) as f64 * self.bin_width
    }

    /// `(lower edge, count)` per bin.
    pub fn bins(&self) -> Vec<(f64, u64)> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.edge(i), c))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `bin_lower_edge,count` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_lower_edge,count\n");
        for (edge, c) in self.bins() {
            s.push_str(&format!("{},{c}\n", format_edge(edge)));
        }
        s
    }
}

pub(crate) fn format_edge(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Uniform bins of `bin_width` from the multiple of the width at or below the
/// minimum up to the bin holding the maximum. Bins are `[edge, edge + width)`.
pub fn histogram(values: &[f64], bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "bin width {bin_width} must be positive"
        )));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(format!("value {v} is not finite")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut first_unit = (min / bin_width).floor() as i64;
    while (first_unit as f64) * bin_width > min {
        first_unit -= 1;
    }
    let edge = |k: i64| k as f64 * bin_width;
    let unit_of = |v: f64| {
        let mut k = (v / bin_width).floor() as i64;
        while edge(k) > v {
            k -= 1;
        }
        while edge(k + 1) <= v {
            k += 1;
        }
        k
    };
    let units: Vec<i64> = values.iter().map(|&v| unit_of(v)).collect();
    let last = *units.iter().max().expect("nonempty");
    let mut counts = vec![0u64; (last - first_unit + 1) as usize];
    for k in units {
        counts[(k - first_unit) as usize] += 1;
    }
    Ok(Histogram {
        bin_width,
        lo: edge(first_unit),
        first_unit,
        counts,
    })
}

/// Largest gap between consecutive primes in `[lo, hi]` and its lower prime.
/// Ties go to the smallest lower prime.
pub fn scan_max_gap(lo: u64, hi: u64) -> Result<(u64, u64)> {
    let mut primes = SegmentedSieve::new(lo, hi.saturating_add(1))?;
    let mut prev = primes.next().ok_or(Error::EmptyInput)?;
    let mut best: Option<(u64, u64)> = None;
    for p in primes {
        let gap = p - prev;
        if best.is_none_or(|(g, _)| gap > g) {
            best = Some((gap, prev));
        }
        prev = p;
    }
    best.ok_or(Error::EmptyInput)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(index: usize, g: usize, m: u16) -> SliceResult {
        SliceResult {
            index,
            first_prime: 2,
            last_prime: 3,
            prime_count: 2,
            g,
            m,
        }
    }

    #[test]
    fn single_record_summary() {
        let s = summarize(&[res(0, 693, 766)]).unwrap();
        assert_eq!(fmt4(s.mean_r), "0.9046");
        assert_eq!(s.share_r_le_1, 1.0);
        assert_eq!(s.stddev_r, 0.0);
        assert_eq!(s.mean_g, 693.0);
    }

    #[test]
    fn two_record_summary() {
        let s = summarize(&[res(0, 9, 10), res(1, 11, 10)]).unwrap();
        assert!((s.mean_r - 1.0).abs() < 1e-12);
        assert_eq!(s.share_r_le_1, 0.5);
        assert!((s.stddev_r - 0.1).abs() < 1e-12);
        assert!((s.max_r - 1.1).abs() < 1e-12);
    }

    #[test]
    fn ties_count_as_at_most_one() {
        let s = summarize(&[res(0, 10, 10)]).unwrap();
        assert_eq!(s.share_r_le_1, 1.0);
    }

    #[test]
    fn empty_summary_is_an_error() {
        assert!(matches!(summarize(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn corridor() {
        let mut s = summarize(&[res(0, 83, 100)]).unwrap();
        assert!(corridor_warnings(&s).is_empty());
        s.share_r_le_1 = 0.9;
        s.mean_r = 1.2;
        assert_eq!(corridor_warnings(&s).len(), 2);
    }

    #[test]
    fn histogram_examples() {
        let h = histogram(&[0.5, 0.5, 1.5], 1.0).unwrap();
        assert_eq!(h.bins(), [(0.0, 2), (1.0, 1)]);
        let h = histogram(&[0.9046], 0.05).unwrap();
        assert_eq!(h.counts, [1]);
        assert_eq!(format_edge(h.lo), "0.9");
        assert_eq!(h.to_csv(), "bin_lower_edge,count\n0.9,1\n");
    }

    #[test]
    fn histogram_edges_are_right_open() {
        let h = histogram(&[1.0, 1.0, 0.98, 1.02], 0.02).unwrap();
        let bins: Vec<(String, u64)> = h
            .bins()
            .into_iter()
            .map(|(e, c)| (format_edge(e), c))
            .collect();
        assert_eq!(
            bins,
            [
                ("0.98".to_string(), 1),
                ("1".to_string(), 2),
                ("1.02".to_string(), 1)
            ]
        );
    }

    #[test]
    fn histogram_errors() {
        assert!(histogram(&[1.0], 0.0).is_err());
        assert!(histogram(&[], 0.1).is_err());
        assert!(histogram(&[f64::NAN], 0.1).is_err());
    }

    #[test]
    fn fmt4_truncates() {
        assert_eq!(fmt4(693.0 / 766.0), "0.9046");
        assert_eq!(fmt4(1.0), "1.0000");
        assert_eq!(fmt4(0.0), "0.0000");
        assert_eq!(fmt4(375.25), "375.2500");
    }

    #[test]
    fn max_gaps() {
        assert_eq!(scan_max_gap(2, 100).unwrap(), (8, 89));
        assert_eq!(scan_max_gap(2, 10_000).unwrap(), (36, 9551));
        assert_eq!(scan_max_gap(2, 3).unwrap(), (1, 2));
        assert!(scan_max_gap(24, 28).is_err());
        assert!(scan_max_gap(23, 28).is_err());
    }
}
