use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use crossbeam_channel::{bounded, unbounded};

use super::{
    process_slice, validate_stitching, ResultLog, SliceResult, SliceSpec, DEFAULT_BODY,
    DEFAULT_OVERLAP, MIN_OVERLAP,
};
use crate::error::{Error, Result};
use crate::primes::{SegmentedSieve, SIEVE_LIMIT};
use crate::stats::{self, fmt4};
use crate::triangle::{DiffKernel, TiledKernel};

/// Called once per slice, in index order, as results are logged.
pub type Progress = Arc<dyn Fn(&SliceResult) + Send + Sync>;

#[derive(Clone)]
pub struct RunConfig {
    /// Primes `<= prime_limit` are verified.
    pub prime_limit: u64,
    pub body_count: usize,
    pub overlap_count: usize,
    pub workers: usize,
    pub log_path: PathBuf,
    pub resume: bool,
    pub kernel: Arc<dyn DiffKernel>,
    /// Overlaps below this are refused. Lower it explicitly for small experiments.
    pub min_overlap: usize,
    pub progress: Option<Progress>,
}

impl RunConfig {
    pub fn new(prime_limit: u64, log_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            prime_limit,
            body_count: DEFAULT_BODY,
            overlap_count: DEFAULT_OVERLAP,
            workers: thread::available_parallelism().map_or(1, |n| n.get()),
            log_path: log_path.into(),
            resume: false,
            kernel: Arc::new(TiledKernel::default()),
            min_overlap: MIN_OVERLAP,
            progress: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.prime_limit < 3 {
            return bad(format!(
                "limit {} leaves fewer than two primes",
                self.prime_limit
            ));
        }
        if self.prime_limit >= SIEVE_LIMIT {
            return Err(Error::RangeTooLarge {
                hi: self.prime_limit.saturating_add(1),
                limit: SIEVE_LIMIT,
            });
        }
        if self.body_count < 2 {
            return bad(format!("slice size {} is below 2", self.body_count));
        }
        if self.overlap_count < self.min_overlap.max(1) {
            return bad(format!(
                "overlap {} is below the minimum {}",
                self.overlap_count,
                self.min_overlap.max(1)
            ));
        }
        if self.workers == 0 {
            return bad("at least one worker is required".into());
        }
        Ok(())
    }
}

impl fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunConfig")
            .field("prime_limit", &self.prime_limit)
            .field("body_count", &self.body_count)
            .field("overlap_count", &self.overlap_count)
            .field("workers", &self.workers)
            .field("log_path", &self.log_path)
            .field("resume", &self.resume)
            .field("kernel", &self.kernel.name())
            .field("min_overlap", &self.min_overlap)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub prime_limit: u64,
    pub total_primes: u64,
    pub slice_count: usize,
    pub g_global: usize,
    /// First slice attaining `g_global`.
    pub g_global_slice: usize,
    pub m_global: u16,
    /// Lower prime of the first occurrence of the largest gap.
    pub argmax_prime: u64,
    pub mean_g: f64,
    pub mean_r: f64,
    pub stddev_r: f64,
    pub share_r_le_1: f64,
}

impl VerificationReport {
    /// `key=value` lines, one per field.
    pub fn to_key_values(&self) -> String {
        format!(
            "prime_limit={}\ntotal_primes={}\nslice_count={}\ng_global={}\ng_global_slice={}\n\
             m_global={}\nargmax_prime={}\nmean_g={}\nmean_r={}\nstddev_r={}\nshare_r_le_1={}\n",
            self.prime_limit,
            self.total_primes,
            self.slice_count,
            self.g_global,
            self.g_global_slice,
            self.m_global,
            self.argmax_prime,
            fmt4(self.mean_g),
            fmt4(self.mean_r),
            fmt4(self.stddev_r),
            fmt4(self.share_r_le_1),
        )
    }
}

struct StreamSummary {
    total_primes: u64,
    slice_count: usize,
    max_gap: u64,
    argmax_prime: u64,
}

/// Streams the primes once, hands each slice to a worker pool and appends
/// results to the log in slice order.
///
/// With `resume`, slices already in the log are not recomputed; their prime
/// ranges are checked against the stream instead.
pub fn run_verification(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let (mut log, existing) = if config.resume {
        ResultLog::resume(&config.log_path)?
    } else {
        (ResultLog::create(&config.log_path)?, Vec::new())
    };

    let cancel = AtomicBool::new(false);
    let existing_ref = &existing;
    let (job_tx, job_rx) = bounded::<(SliceSpec, Vec<u64>)>(config.workers);
    let (res_tx, res_rx) = unbounded::<(usize, Result<SliceResult>)>();

    let mut results = existing.clone();
    let mut failure: Option<Error> = None;

    let produced = thread::scope(|scope| {
        for _ in 0..config.workers {
            let job_rx = job_rx.clone();
            let res_tx = res_tx.clone();
            let kernel = Arc::clone(&config.kernel);
            let cancel = &cancel;
            scope.spawn(move || {
                for (spec, primes) in job_rx {
                    if cancel.load(Ordering::Relaxed) {
                        continue;
                    }
                    let r = process_slice(&spec, &primes, kernel.as_ref());
                    if res_tx.send((spec.index, r)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(job_rx);
        drop(res_tx);

        let cancel_ref = &cancel;
        let producer = scope.spawn(move || {
            let out = produce(config, existing_ref, &job_tx, cancel_ref);
            if out.is_err() {
                cancel_ref.store(true, Ordering::Relaxed);
            }
            out
        });

        let mut pending = BTreeMap::new();
        for (index, r) in res_rx {
            if failure.is_some() {
                continue;
            }
            pending.insert(index, r);
            while let Some(r) = pending.remove(&results.len()) {
                let step = r.and_then(|r| log.append(&r).map(|_| r));
                match step {
                    Ok(r) => {
                        if let Some(p) = &config.progress {
                            p(&r);
                        }
                        results.push(r);
                    }
                    Err(e) => {
                        failure = Some(e);
                        cancel.store(true, Ordering::Relaxed);
                        break;
                    }
                }
            }
        }
        producer.join().expect("prime producer panicked")
    });

    let summary = produced?;
    if let Some(e) = failure {
        return Err(e);
    }
    if results.len() != summary.slice_count {
        return Err(Error::LogMismatch {
            path: config.log_path.clone(),
            msg: format!(
                "log holds {} slices, the range has {}",
                results.len(),
                summary.slice_count
            ),
        });
    }
    let stitch = validate_stitching(&results, config.overlap_count);
    if !stitch.is_valid() {
        return Err(Error::InvalidConfig(stitch.violations.join("; ")));
    }

    let s = stats::summarize(&results)?;
    let (g_global_slice, g_global) =
        results
            .iter()
            .map(|r| r.g)
            .enumerate()
            .fold(
                (0, 0),
                |best, (i, g)| if g > best.1 { (i, g) } else { best },
            );
    let m_global = results.iter().map(|r| r.m).max().unwrap_or(0);
    debug_assert_eq!(m_global as u64, summary.max_gap);
    Ok(VerificationReport {
        prime_limit: config.prime_limit,
        total_primes: summary.total_primes,
        slice_count: summary.slice_count,
        g_global,
        g_global_slice,
        m_global,
        argmax_prime: summary.argmax_prime,
        mean_g: s.mean_g,
        mean_r: s.mean_r,
        stddev_r: s.stddev_r,
        share_r_le_1: s.share_r_le_1,
    })
}

fn produce(
    config: &RunConfig,
    existing: &[SliceResult],
    jobs: &crossbeam_channel::Sender<(SliceSpec, Vec<u64>)>,
    cancel: &AtomicBool,
) -> Result<StreamSummary> {
    let body = config.body_count;
    let width = body + config.overlap_count;
    let mut buf: Vec<u64> = Vec::with_capacity(width);
    let mut summary = StreamSummary {
        total_primes: 0,
        slice_count: 0,
        max_gap: 0,
        argmax_prime: 2,
    };
    let mut prev = 0u64;

    let emit = |primes: &[u64], summary: &mut StreamSummary| -> Result<()> {
        let index = summary.slice_count;
        summary.slice_count += 1;
        if let Some(old) = existing.get(index) {
            let same = old.first_prime == primes[0]
                && old.last_prime == primes[primes.len() - 1]
                && old.prime_count == primes.len();
            if !same {
                return Err(Error::LogMismatch {
                    path: config.log_path.clone(),
                    msg: format!(
                        "slice {index} was logged as [{}, {}] x{}, this run gives [{}, {}] x{} \
                         (different slice size or overlap?)",
                        old.first_prime,
                        old.last_prime,
                        old.prime_count,
                        primes[0],
                        primes[primes.len() - 1],
                        primes.len()
                    ),
                });
            }
            return Ok(());
        }
        let spec = SliceSpec {
            index,
            start_ordinal: index as u64 * body as u64,
            body_count: body,
            overlap_count: config.overlap_count,
        };
        // A closed channel means the workers are gone; the writer reports why.
        let _ = jobs.send((spec, primes.to_vec()));
        Ok(())
    };

    for p in SegmentedSieve::new(2, config.prime_limit + 1)? {
        if prev != 0 && p - prev > summary.max_gap {
            summary.max_gap = p - prev;
            summary.argmax_prime = prev;
        }
        prev = p;
        summary.total_primes += 1;
        buf.push(p);
        if buf.len() == width {
            emit(&buf, &mut summary)?;
            buf.drain(..body);
            if cancel.load(Ordering::Relaxed) {
                return Ok(summary);
            }
        }
    }
    while !buf.is_empty() {
        emit(&buf, &mut summary)?;
        if buf.len() <= body {
            break;
        }
        buf.drain(..body);
    }
    Ok(summary)
}
