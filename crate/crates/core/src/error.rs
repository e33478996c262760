use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("range [{lo}, {hi}) is empty or malformed")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("range end {hi} exceeds the sieve limit {limit}; use neighbor-prime queries instead")]
    RangeTooLarge { hi: u64, limit: u64 },

    #[error("no 64-bit prime above {0}")]
    Overflow(u64),

    #[error("no prime below {0}")]
    NoPrimeBelow(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("only {available} primes are <= {p}, {requested} requested")]
    InsufficientPrimes {
        p: u64,
        requested: usize,
        available: usize,
    },

    #[error("gap {gap} after {lower_prime} does not fit in 16 bits")]
    GapOverflow { gap: u64, lower_prime: u64 },

    #[error("prime list is not strictly increasing at position {0}")]
    NotIncreasing(usize),

    #[error("row of length {0} is too short to difference")]
    RowExhausted(usize),

    #[error("no terminal row within {max_steps} steps")]
    StepBudgetExhausted { max_steps: usize },

    #[error(
        "slice {index}: no terminal row within overlap {overlap} (rerun with a larger overlap)"
    )]
    OverlapExhausted { index: usize, overlap: usize },

    #[error("no terminal row inside the window ({before} before, {after} after); enlarge it")]
    WindowTooSmall { before: usize, after: usize },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("{0}")]
    InvalidConfig(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("record says gap {expected} after {lower_prime}, primes show {actual}")]
    GapMismatch {
        lower_prime: u64,
        expected: u16,
        actual: u64,
    },

    #[error("{0} is beyond 64-bit reach")]
    BeyondReach(u128),

    #[error("empty input")]
    EmptyInput,

    #[error("log {path}: {msg}")]
    LogMismatch { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}
