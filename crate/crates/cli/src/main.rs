mod num;

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gilbreath::pipeline::{self, RunConfig, DEFAULT_BODY, DEFAULT_OVERLAP};
use gilbreath::predictor::{
    parse_gap_table, GapRecord, GapTable, Predictor, DEFAULT_AFTER, DEFAULT_BEFORE,
    PREDICTION_HEADER,
};
use gilbreath::primes::{prime_source, primes_in_range, PRIME_SOURCES};
use gilbreath::stats::{self, fmt4};
use gilbreath::triangle::{format_ratio, full_triangle_oracle, DiffKernel, KernelRegistry};
use gilbreath::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_OVERLAP: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;
const EXIT_SENSITIVITY: u8 = 5;
const EXIT_BAD_LOG: u8 = 6;

const ORACLE_LIMIT: u64 = 1_000_000_000;

#[derive(Parser)]
#[command(
    name = "gilbreath",
    version,
    about = "Verify the Gilbreath conjecture over the primes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sliced verification over all primes up to a limit.
    Verify(VerifyArgs),
    /// Compute the full triangle directly (small limits only).
    Oracle(OracleArgs),
    /// Compute G′ on a window around record prime gaps.
    Predict(PredictArgs),
    /// Summarise a result log; optionally write a histogram.
    Stats(StatsArgs),
    /// Find the largest prime gap in a range.
    ScanGaps(ScanArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify primes up to and including this bound.
    #[arg(long, value_parser = num::parse_u64)]
    limit: u64,
    /// Primes per slice body.
    #[arg(long, value_parser = num::parse_usize, default_value_t = DEFAULT_BODY)]
    slice_size: usize,
    /// Extra primes each slice shares with the next.
    #[arg(long, value_parser = num::parse_usize, default_value_t = DEFAULT_OVERLAP)]
    overlap: usize,
    /// Worker threads (defaults to the hardware parallelism).
    #[arg(long, value_parser = num::parse_usize)]
    threads: Option<usize>,
    /// Result log (CSV).
    #[arg(long, default_value = "gilbreath-results.csv")]
    out: PathBuf,
    /// Continue an interrupted run from the existing log.
    #[arg(long)]
    resume: bool,
    /// Differencing kernel.
    #[arg(long, default_value = KernelRegistry::DEFAULT)]
    kernel: String,
    /// Accept overlaps below the usual minimum (for experiments).
    #[arg(long)]
    allow_small_overlap: bool,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_parser = num::parse_u64)]
    limit: u64,
}

#[derive(Args)]
struct PredictArgs {
    /// Lower prime of a record gap.
    #[arg(long, value_parser = num::parse_u128, requires = "gap", conflicts_with = "gaps_file")]
    prime: Option<u128>,
    /// Size of the gap after `--prime`.
    #[arg(long, value_parser = num::parse_u16, requires = "prime")]
    gap: Option<u16>,
    /// Table of `gap prime [label]` lines.
    #[arg(long, required_unless_present = "prime")]
    gaps_file: Option<PathBuf>,
    /// Primes up to and including the lower prime.
    #[arg(long, value_parser = num::parse_usize, default_value_t = DEFAULT_BEFORE)]
    before: usize,
    /// Primes after the lower prime.
    #[arg(long, value_parser = num::parse_usize, default_value_t = DEFAULT_AFTER)]
    after: usize,
    /// Skip the doubled-window check.
    #[arg(long)]
    no_sensitivity: bool,
    /// Also write the CSV to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = KernelRegistry::DEFAULT)]
    kernel: String,
    #[arg(long, default_value = "auto", value_parser = clap::builder::PossibleValuesParser::new(PRIME_SOURCES))]
    prime_source: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    R,
    G,
}

#[derive(Args)]
struct StatsArgs {
    /// Result log written by `verify`.
    log: PathBuf,
    /// Histogram CSV output.
    #[arg(long)]
    hist_out: Option<PathBuf>,
    /// Histogram SVG output.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Histogram bin width (default 0.02 for R, 10 for G).
    #[arg(long)]
    bin_width: Option<f64>,
    /// Quantity to histogram.
    #[arg(long, value_enum, default_value_t = Metric::R)]
    metric: Metric,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_parser = num::parse_u64, default_value_t = 2)]
    from: u64,
    /// Inclusive upper bound.
    #[arg(long, value_parser = num::parse_u64)]
    limit: u64,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::OverlapExhausted { .. } => EXIT_OVERLAP,
            Error::Io(_) => EXIT_IO,
            Error::LogMismatch { .. } | Error::Parse { .. } => EXIT_BAD_LOG,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn kernel(name: &str) -> Result<Arc<dyn DiffKernel>, Failure> {
    Ok(KernelRegistry::builtin().get(name)?)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let mut config = RunConfig::new(a.limit, &a.out);
    config.body_count = a.slice_size;
    config.overlap_count = a.overlap;
    if let Some(t) = a.threads {
        config.workers = t;
    }
    config.resume = a.resume;
    config.kernel = kernel(&a.kernel)?;
    if a.allow_small_overlap {
        config.min_overlap = 1;
    }
    config.progress = Some(Arc::new(|r: &pipeline::SliceResult| {
        eprintln!("slice {} g={} m={} r={}", r.index, r.g, r.m, r.r_text());
    }));
    let report = pipeline::run_verification(&config)?;
    let text = report.to_key_values();
    print!("{text}");
    if let Some(path) = a.report {
        fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> CmdResult {
    if a.limit > ORACLE_LIMIT {
        return Err(Failure {
            code: EXIT_TOO_LARGE,
            msg: format!(
                "oracle limit {} exceeds {ORACLE_LIMIT}; use verify",
                a.limit
            ),
        });
    }
    if a.limit < 3 {
        return Err(Error::InvalidConfig(format!(
            "limit {} leaves fewer than two primes",
            a.limit
        ))
        .into());
    }
    let primes = primes_in_range(2, a.limit + 1)?;
    let out = full_triangle_oracle(&primes, true)?;
    println!("limit={}", a.limit);
    println!("prime_count={}", primes.len());
    println!("g={}", out.g);
    println!("m={}", out.m);
    println!("r={}", format_ratio(out.g, out.m));
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> CmdResult {
    let table = match (&a.gaps_file, a.prime, a.gap) {
        (Some(path), _, _) => {
            let t = parse_gap_table(BufReader::new(File::open(path)?)).map_err(|e| Failure {
                code: EXIT_USAGE,
                msg: format!("{}: {e}", path.display()),
            })?;
            for w in &t.warnings {
                eprintln!("warning: {w}");
            }
            t
        }
        (None, Some(p), Some(g)) => {
            if !(2..32_768).contains(&g) || g % 2 == 1 {
                return Err(Error::InvalidConfig(format!(
                    "gap {g} is not an even number in [2, 32768)"
                ))
                .into());
            }
            GapTable {
                records: vec![GapRecord::new(g, p)],
                warnings: Vec::new(),
            }
        }
        _ => unreachable!("clap enforces --prime/--gap or --gaps-file"),
    };
    let predictor = Predictor::new(
        Arc::from(prime_source(&a.prime_source)?),
        kernel(&a.kernel)?,
    );

    println!("{PREDICTION_HEADER}");
    let mut lines = vec![PREDICTION_HEADER.to_string()];
    let mut unstable = Vec::new();
    let total = table.records.len();
    for (i, rec) in table.records.iter().enumerate() {
        if rec.needs_stepping() {
            eprintln!(
                "note: {} is past the sieve limit; primes are found by stepping, \
                 expect several seconds per million primes",
                rec.lower_prime
            );
        }
        eprintln!(
            "[{}/{total}] gap {} after {}",
            i + 1,
            rec.gap,
            rec.lower_prime
        );
        let p = if a.no_sensitivity {
            predictor.local_g_prime(rec, a.before, a.after)?
        } else {
            let (p, stable) = predictor.predict_checked(rec, a.before, a.after)?;
            if !stable {
                unstable.push(rec.lower_prime);
            }
            p
        };
        let line = p.to_csv_line();
        println!("{line}");
        io::stdout().flush()?;
        lines.push(line);
    }
    if let Some(path) = a.out {
        fs::write(path, lines.join("\n") + "\n")?;
    }
    if !unstable.is_empty() {
        let list: Vec<String> = unstable.iter().map(|p| p.to_string()).collect();
        return Err(Failure {
            code: EXIT_SENSITIVITY,
            msg: format!(
                "G′ changed when the window was doubled for: {}",
                list.join(", ")
            ),
        });
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> CmdResult {
    let results = pipeline::read_log(&a.log)?;
    if results.is_empty() {
        return Err(Failure {
            code: EXIT_BAD_LOG,
            msg: format!("{}: log holds no slices", a.log.display()),
        });
    }
    let s = stats::summarize(&results)?;
    println!("slices={}", s.count);
    println!("mean_g={}", fmt4(s.mean_g));
    println!("mean_r={}", fmt4(s.mean_r));
    println!("stddev_r={}", fmt4(s.stddev_r));
    println!("share_r_le_1={}", fmt4(s.share_r_le_1));
    println!("max_r={}", fmt4(s.max_r));
    for w in stats::corridor_warnings(&s) {
        eprintln!("warning: {w}");
    }

    if a.hist_out.is_none() && a.svg.is_none() {
        return Ok(());
    }
    let (values, width, label): (Vec<f64>, f64, &str) = match a.metric {
        Metric::R => (
            results.iter().filter(|r| r.m > 0).map(|r| r.r()).collect(),
            a.bin_width.unwrap_or(stats::DEFAULT_R_BIN_WIDTH),
            "R = G / M",
        ),
        Metric::G => (
            results.iter().map(|r| r.g as f64).collect(),
            a.bin_width.unwrap_or(10.0),
            "G",
        ),
    };
    let hist = stats::histogram(&values, width)?;
    if let Some(path) = a.hist_out {
        fs::write(path, hist.to_csv())?;
    }
    if let Some(path) = a.svg {
        let title = format!("{label} per slice ({} slices)", values.len());
        stats::emit_svg(&hist, &title, label, &path)?;
    }
    Ok(())
}

fn cmd_scan(a: ScanArgs) -> CmdResult {
    let (gap, lower) = stats::scan_max_gap(a.from, a.limit)?;
    println!("gap={gap}");
    println!("lower_prime={lower}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Stats(a) => cmd_stats(a),
        Command::ScanGaps(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
