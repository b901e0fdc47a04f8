//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.
//!
//! `GRAPHCORR_VERIFY_SEED` overrides the seed and extra arguments select suites.

use graphcorr::experiments::configure_workers;
use graphcorr::experiments::verify::{verify, DEFAULT_VERIFY_SEED};

fn main() {
    if let Err(e) = configure_workers() {
        eprintln!("{e}");
        std::process::exit(2);
    }
    let seed = std::env::var("GRAPHCORR_VERIFY_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_VERIFY_SEED);
    // The test harness passes flags such as `--nocapture`; keep only suite names.
    let selection: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let report = match verify(&selection, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    print!("{}", report.render());
    if !report.all_passed() {
        std::process::exit(1);
    }
}
