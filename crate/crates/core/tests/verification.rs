use std::fs;
use std::path::Path;

use gilbreath::pipeline::{read_log, run_verification, RunConfig};
use gilbreath::primes::primes_in_range;
use gilbreath::triangle::full_triangle_oracle;
use gilbreath::Error;

fn config(limit: u64, body: usize, overlap: usize, workers: usize, path: &Path) -> RunConfig {
    let mut c = RunConfig::new(limit, path);
    c.body_count = body;
    c.overlap_count = overlap;
    c.workers = workers;
    c.min_overlap = 1;
    c
}

#[test]
fn matches_oracle_on_small_limits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.csv");
    for (limit, body, overlap) in [
        (3, 2, 5),
        (100, 2, 30),
        (1000, 37, 60),
        (100_000, 1000, 200),
    ] {
        let primes = primes_in_range(2, limit + 1).unwrap();
        let want = full_triangle_oracle(&primes, true).unwrap();
        let rep = run_verification(&config(limit, body, overlap, 2, &path)).unwrap();
        assert_eq!(rep.g_global, want.g, "limit {limit}");
        assert_eq!(rep.m_global, want.m);
        assert_eq!(rep.total_primes, primes.len() as u64);
        assert_eq!(read_log(&path).unwrap().len(), rep.slice_count);
    }
}

#[test]
fn worker_count_does_not_change_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let mut logs = Vec::new();
    for workers in [1, 3, 8] {
        let path = dir.path().join(format!("w{workers}.csv"));
        run_verification(&config(3_000_000, 20_000, 600, workers, &path)).unwrap();
        logs.push(fs::read(&path).unwrap());
    }
    assert!(logs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn resume_finishes_a_torn_log() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let cut = dir.path().join("cut.csv");
    let c = config(2_000_000, 10_000, 500, 2, &full);
    let rep = run_verification(&c).unwrap();
    let text = fs::read_to_string(&full).unwrap();

    // Keep the header, four records and half of the fifth.
    let ends: Vec<usize> = text.match_indices('\n').map(|(i, _)| i + 1).collect();
    fs::write(&cut, &text[..ends[4] + (ends[5] - ends[4]) / 2]).unwrap();

    let mut c2 = config(2_000_000, 10_000, 500, 3, &cut);
    c2.resume = true;
    assert_eq!(run_verification(&c2).unwrap(), rep);
    assert_eq!(fs::read_to_string(&cut).unwrap(), text);

    // Resuming a finished log recomputes nothing and changes nothing.
    assert_eq!(run_verification(&c2).unwrap(), rep);
    assert_eq!(fs::read_to_string(&cut).unwrap(), text);
}

#[test]
fn resume_with_other_parameters_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.csv");
    run_verification(&config(200_000, 5_000, 300, 1, &path)).unwrap();
    let mut c = config(200_000, 6_000, 300, 1, &path);
    c.resume = true;
    assert!(matches!(
        run_verification(&c),
        Err(Error::LogMismatch { .. })
    ));
}

#[test]
fn exhaustion_and_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.csv");
    assert!(matches!(
        run_verification(&config(1_000_000, 5_000, 20, 2, &path)),
        Err(Error::OverlapExhausted { .. })
    ));
    let mut c = RunConfig::new(1_000_000, &path);
    c.overlap_count = 100;
    assert!(matches!(run_verification(&c), Err(Error::InvalidConfig(_))));
    assert!(run_verification(&config(2, 10, 10, 1, &path)).is_err());
    assert!(run_verification(&config(100, 10, 10, 0, &path)).is_err());
    assert!(matches!(
        run_verification(&config(u64::MAX / 2, 10, 10, 1, &path)),
        Err(Error::RangeTooLarge { .. })
    ));
}
