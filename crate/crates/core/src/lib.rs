//! Blockwise verification of the Gilbreath conjecture.
//!
//! Row 0 of the triangle is the primes, row 1 their gaps, and every further
//! row the absolute differences of its predecessor. A row made only of 0s and
//! 2s (after a leading 1 when the primes start at 2) stays that way forever, so
//! reaching one certifies every deeper row over the covered primes.
//!
//! The crate is organised around that computation:
//!
//! * [`primes`]: segmented sieve, deterministic Miller-Rabin, prime windows.
//! * [`triangle`]: gap rows, the differencing kernels and a brute-force oracle.
//! * [`pipeline`]: overlapping slices, parallel workers, the resumable result log.
//! * [`predictor`]: G′ computed on windows around record prime gaps.
//! * [`stats`]: slice statistics, histograms, SVG output, max-gap scans.

pub mod error;
pub mod pipeline;
pub mod predictor;
pub mod primes;
pub mod stats;
pub mod triangle;

pub use error::{Error, Result};
