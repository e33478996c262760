//! Append-only CSV log of slice results.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::SliceResult;
use crate::error::{Error, Result};
use crate::triangle::format_ratio;

pub const LOG_HEADER: &str = "index,first_prime,last_prime,prime_count,g,m,r";

pub(crate) fn format_record(r: &SliceResult) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.index,
        r.first_prime,
        r.last_prime,
        r.prime_count,
        r.g,
        r.m,
        format_ratio(r.g, r.m)
    )
}

fn parse_record(line: &str, line_no: usize) -> Result<SliceResult> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 7 {
        return Err(err(format!("expected 7 fields, found {}", fields.len())));
    }
    fn num<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
        s.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad {name} `{s}`"),
        })
    }
    let rec = SliceResult {
        index: num(fields[0], "index", line_no)?,
        first_prime: num(fields[1], "first_prime", line_no)?,
        last_prime: num(fields[2], "last_prime", line_no)?,
        prime_count: num(fields[3], "prime_count", line_no)?,
        g: num(fields[4], "g", line_no)?,
        m: num(fields[5], "m", line_no)?,
    };
    let r = fields[6].trim();
    if r != format_ratio(rec.g, rec.m) {
        return Err(err(format!(
            "r `{r}` does not match g/m = {}",
            format_ratio(rec.g, rec.m)
        )));
    }
    Ok(rec)
}

/// Reads a complete log. Every line after the header must be a record.
pub fn read_log(path: &Path) -> Result<Vec<SliceResult>> {
    let text = fs::read_to_string(path)?;
    parse_log(&text)
}

fn parse_log(text: &str) -> Result<Vec<SliceResult>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == LOG_HEADER => {}
        Some(h) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{LOG_HEADER}`, found `{h}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(line, i + 2)?);
    }
    Ok(out)
}

/// Writer side of the log; one flushed line per slice.
pub struct ResultLog {
    out: BufWriter<File>,
}

impl ResultLog {
    /// Starts a fresh log, replacing any existing file.
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{LOG_HEADER}")?;
        out.flush()?;
        Ok(ResultLog { out })
    }

    /// Reopens a log for appending and returns the records it already holds.
    ///
    /// A final line without a newline (an interrupted write) is cut off; any
    /// other malformed or out-of-order line is an error.
    pub fn resume(path: &Path) -> Result<(Self, Vec<SliceResult>)> {
        if !path.exists() {
            return Ok((Self::create(path)?, Vec::new()));
        }
        let text = fs::read_to_string(path)?;
        let mismatch = |msg: String| Error::LogMismatch {
            path: PathBuf::from(path),
            msg,
        };
        let complete = match text.rfind('\n') {
            Some(i) => &text[..=i],
            None => "",
        };
        if complete.is_empty() {
            return Ok((Self::create(path)?, Vec::new()));
        }
        let records = parse_log(complete).map_err(|e| mismatch(e.to_string()))?;
        for (i, r) in records.iter().enumerate() {
            if r.index != i {
                return Err(mismatch(format!("record {i} has index {}", r.index)));
            }
        }
        let file = OpenOptions::new().write(true).open(path)?;
        file.set_len(complete.len() as u64)?;
        drop(file);
        let file = OpenOptions::new().append(true).open(path)?;
        Ok((
            ResultLog {
                out: BufWriter::new(file),
            },
            records,
        ))
    }

    pub fn append(&mut self, r: &SliceResult) -> Result<()> {
        writeln!(self.out, "{}", format_record(r))?;
        self.out.flush()?;
        Ok(())
    }
}
