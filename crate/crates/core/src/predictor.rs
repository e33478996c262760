//! G′: the triangle run on a window of primes around a known record gap.
//!
//! A record gap drives the step count of whatever slice contains it, so the
//! window's step count anticipates the global G without touching the rest of
//! the range. Influence travels one position left per row, which is why the
//! window needs at least G′ primes on each side of the gap.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::{is_prime, AutoSource, PrimeSource, SIEVE_LIMIT};
use crate::triangle::{self, format_ratio, DiffKernel, TiledKernel};

pub const DEFAULT_BEFORE: usize = 4_000;
pub const DEFAULT_AFTER: usize = 2_000_000;

pub const PREDICTION_HEADER: &str =
    "label,gap,lower_prime,g_prime,ratio,window_before,window_after";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRecord {
    pub gap: u16,
    pub lower_prime: u128,
    pub label: Option<String>,
}

impl GapRecord {
    pub fn new(gap: u16, lower_prime: u128) -> Self {
        GapRecord {
            gap,
            lower_prime,
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// True when the window around this record cannot be sieved.
    pub fn needs_stepping(&self) -> bool {
        self.lower_prime >= SIEVE_LIMIT as u128 / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GapTable {
    /// Ascending by `lower_prime`.
    pub records: Vec<GapRecord>,
    /// Lines that were skipped, with the reason.
    pub warnings: Vec<String>,
}

/// Reads `gap prime [label...]` lines; `#` starts a comment line.
pub fn parse_gap_table(input: impl BufRead) -> Result<GapTable> {
    let mut table = GapTable::default();
    let mut seen = HashMap::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut tokens = line.split_whitespace();
        let gap_tok = tokens.next().expect("nonempty line");
        let prime_tok = tokens
            .next()
            .ok_or_else(|| err("expected `gap prime`".into()))?;
        let gap: u64 = gap_tok
            .parse()
            .map_err(|_| err(format!("bad gap `{gap_tok}`")))?;
        let prime: u128 = prime_tok
            .parse()
            .map_err(|_| err(format!("bad prime `{prime_tok}`")))?;
        let label: Vec<&str> = tokens.collect();

        if gap == 1 && prime == 2 {
            table
                .warnings
                .push(format!("line {line_no}: skipped the odd gap 1 after 2"));
            continue;
        }
        if gap < 2 || gap % 2 == 1 {
            return Err(err(format!("gap {gap} is not an even number >= 2")));
        }
        if gap >= triangle::GAP_LIMIT {
            return Err(err(format!("gap {gap} does not fit in 16 bits")));
        }
        if let Some(first) = seen.insert(prime, line_no) {
            return Err(err(format!("prime {prime} already listed on line {first}")));
        }
        table.records.push(GapRecord {
            gap: gap as u16,
            lower_prime: prime,
            label: (!label.is_empty()).then(|| label.join(" ")),
        });
    }
    table.records.sort_by_key(|r| r.lower_prime);
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub record: GapRecord,
    pub g_prime: usize,
    /// Primes actually used on each side; `window_before` includes the lower prime.
    pub window_before: usize,
    pub window_after: usize,
}

impl PredictionRecord {
    pub fn ratio(&self) -> f64 {
        triangle::ratio(self.g_prime, self.record.gap)
    }

    pub fn ratio_text(&self) -> String {
        format_ratio(self.g_prime, self.record.gap)
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.record.label.as_deref().unwrap_or(""),
            self.record.gap,
            self.record.lower_prime,
            self.g_prime,
            self.ratio_text(),
            self.window_before,
            self.window_after
        )
    }
}

/// Which table rows to predict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowSelection {
    All,
    Indices(Vec<usize>),
    Labels(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct Predictor {
    pub source: Arc<dyn PrimeSource>,
    pub kernel: Arc<dyn DiffKernel>,
}

impl Default for Predictor {
    fn default() -> Self {
        Predictor {
            source: Arc::new(AutoSource),
            kernel: Arc::new(TiledKernel::default()),
        }
    }
}

impl Predictor {
    pub fn new(source: Arc<dyn PrimeSource>, kernel: Arc<dyn DiffKernel>) -> Self {
        Predictor { source, kernel }
    }

    /// G′ on `before` primes up to and including the record's lower prime and
    /// `after` primes past it.
    ///
    /// Near 2 the left side is clamped to the primes that exist and the row
    /// keeps its leading 1. The step budget is the smaller side (only the
    /// right side when the window starts at 2); exceeding it is
    /// [`Error::WindowTooSmall`].
    pub fn local_g_prime(
        &self,
        record: &GapRecord,
        before: usize,
        after: usize,
    ) -> Result<PredictionRecord> {
        if before == 0 || after == 0 {
            return Err(Error::InvalidConfig(
                "window needs at least one prime on each side".into(),
            ));
        }
        let p = u64::try_from(record.lower_prime)
            .map_err(|_| Error::BeyondReach(record.lower_prime))?;
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut window = self.source.backward(p, before)?;
        let window_before = window.len();
        let starts_at_two = window.first() == Some(&2);
        let right = self.source.forward(p, after)?;
        let actual = right[0] - p;
        if actual != record.gap as u64 {
            return Err(Error::GapMismatch {
                lower_prime: p,
                expected: record.gap,
                actual,
            });
        }
        window.extend_from_slice(&right);

        let mut row = triangle::gaps_from_primes(&window, starts_at_two)?;
        let budget = if starts_at_two {
            after
        } else {
            window_before.min(after)
        };
        let g_prime = match self.kernel.run(&mut row, budget) {
            Ok(t) => t.g,
            Err(Error::StepBudgetExhausted { .. }) => {
                return Err(Error::WindowTooSmall {
                    before: window_before,
                    after,
                })
            }
            Err(e) => return Err(e),
        };
        Ok(PredictionRecord {
            record: record.clone(),
            g_prime,
            window_before,
            window_after: after,
        })
    }

    /// The prediction at `(before, after)` and whether `(2 before, 2 after)` agrees.
    pub fn predict_checked(
        &self,
        record: &GapRecord,
        before: usize,
        after: usize,
    ) -> Result<(PredictionRecord, bool)> {
        let base = self.local_g_prime(record, before, after)?;
        let wide = self.local_g_prime(record, 2 * before, 2 * after)?;
        let agrees = base.g_prime == wide.g_prime;
        Ok((base, agrees))
    }

    pub fn window_sensitivity_check(
        &self,
        record: &GapRecord,
        before: usize,
        after: usize,
    ) -> Result<bool> {
        self.predict_checked(record, before, after)
            .map(|(_, ok)| ok)
    }

    /// One prediction per selected row, in table order. Rows run in parallel.
    pub fn predict_table(
        &self,
        table: &GapTable,
        rows: &RowSelection,
        before: usize,
        after: usize,
    ) -> Result<Vec<PredictionRecord>> {
        let selected: Vec<&GapRecord> = match rows {
            RowSelection::All => table.records.iter().collect(),
            RowSelection::Indices(ix) => ix
                .iter()
                .map(|&i| {
                    table.records.get(i).ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "row {i} out of range ({} rows)",
                            table.records.len()
                        ))
                    })
                })
                .collect::<Result<_>>()?,
            RowSelection::Labels(labels) => labels
                .iter()
                .map(|l| {
                    table
                        .records
                        .iter()
                        .find(|r| r.label.as_deref() == Some(l.as_str()))
                        .ok_or_else(|| Error::InvalidConfig(format!("no row labelled `{l}`")))
                })
                .collect::<Result<_>>()?,
        };
        selected
            .into_par_iter()
            .map(|r| self.local_g_prime(r, before, after))
            .collect()
    }
}

pub fn local_g_prime(record: &GapRecord, before: usize, after: usize) -> Result<PredictionRecord> {
    Predictor::default().local_g_prime(record, before, after)
}

pub fn window_sensitivity_check(record: &GapRecord, before: usize, after: usize) -> Result<bool> {
    Predictor::default().window_sensitivity_check(record, before, after)
}

pub fn predict_table(
    table: &GapTable,
    rows: &RowSelection,
    before: usize,
    after: usize,
) -> Result<Vec<PredictionRecord>> {
    Predictor::default().predict_table(table, rows, before, after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::primes_in_range;
    use crate::triangle::full_triangle_oracle;

    #[test]
    fn parse_lines() {
        let text = "# first occurrences\n\
                    766 19581334192423\n\
                    \n\
                    880\t277900416100927  K=15\n\
                    1 2\n";
        let t = parse_gap_table(text.as_bytes()).unwrap();
        assert_eq!(
            t.records,
            [
                GapRecord::new(766, 19_581_334_192_423),
                GapRecord::new(880, 277_900_416_100_927).labeled("K=15"),
            ]
        );
        assert_eq!(t.warnings.len(), 1);
        assert!(t.warnings[0].starts_with("line 5"));
    }

    #[test]
    fn parse_sorts_and_keeps_wide_primes() {
        let t = parse_gap_table("1402 10103695526434940251\n34 1327\n".as_bytes()).unwrap();
        assert_eq!(t.records[0].lower_prime, 1327);
        assert_eq!(t.records[1].lower_prime, 10_103_695_526_434_940_251);
        let t = parse_gap_table("36 123456789012345678901234\n".as_bytes()).unwrap();
        assert!(matches!(
            local_g_prime(&t.records[0], 10, 10),
            Err(Error::BeyondReach(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, line) in [
            ("766 19581334192423\n7 23\n", 2),
            ("# c\n766\n", 2),
            ("x 5\n", 1),
            ("40000 5\n", 1),
            ("0 5\n", 1),
        ] {
            match parse_gap_table(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_gap_table("6 23\n# c\n6 23\n".as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn window_near_two_keeps_the_leading_one() {
        // 4000 requested, only 9 primes up to 23 exist.
        let p = local_g_prime(&GapRecord::new(6, 23), DEFAULT_BEFORE, 100).unwrap();
        assert_eq!(p.window_before, 9);
        let primes: Vec<u64> = primes_in_range(2, 600).unwrap().primes[..109].to_vec();
        assert_eq!(primes[8], 23);
        assert_eq!(p.g_prime, full_triangle_oracle(&primes, true).unwrap().g);
    }

    #[test]
    fn planted_max_gap_matches_oracle() {
        // 34 after 1327 is the largest gap below 10^4 that sits far from 2.
        let all = primes_in_range(2, 100_000).unwrap().primes;
        let at = all.iter().position(|&q| q == 1327).unwrap();
        let (before, after) = (150, 600);
        let window = &all[at + 1 - before..=at + after];
        let oracle = full_triangle_oracle(window, false).unwrap();
        let p = local_g_prime(&GapRecord::new(34, 1327), before, after).unwrap();
        assert_eq!(p.g_prime, oracle.g);
        assert_eq!(oracle.m, 34);
    }

    #[test]
    fn mismatched_gap_and_composite_prime() {
        assert!(matches!(
            local_g_prime(&GapRecord::new(8, 1327), 10, 10),
            Err(Error::GapMismatch { actual: 34, .. })
        ));
        assert!(matches!(
            local_g_prime(&GapRecord::new(8, 1329), 10, 10),
            Err(Error::NotPrime(1329))
        ));
    }

    #[test]
    fn small_window_is_an_error_not_a_wrong_answer() {
        let r = GapRecord::new(34, 1327);
        assert!(matches!(
            local_g_prime(&r, 150, 5),
            Err(Error::WindowTooSmall { .. })
        ));
        assert!(matches!(
            window_sensitivity_check(&r, 5, 600),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn table_selection() {
        let t = parse_gap_table("34 1327 a\n36 9551 b\n".as_bytes()).unwrap();
        let all = predict_table(&t, &RowSelection::All, 200, 800).unwrap();
        assert_eq!(all.len(), 2);
        let by_label =
            predict_table(&t, &RowSelection::Labels(vec!["b".into()]), 200, 800).unwrap();
        assert_eq!(by_label, all[1..]);
        assert!(predict_table(&t, &RowSelection::Indices(vec![]), 200, 800)
            .unwrap()
            .is_empty());
        assert!(predict_table(&t, &RowSelection::Indices(vec![5]), 200, 800).is_err());
    }

    #[test]
    fn csv_line() {
        let p = PredictionRecord {
            record: GapRecord::new(766, 19_581_334_192_423).labeled("1989"),
            g_prime: 693,
            window_before: 4000,
            window_after: 2_000_000,
        };
        assert_eq!(
            p.to_csv_line(),
            "1989,766,19581334192423,693,0.9046,4000,2000000"
        );
    }
}
