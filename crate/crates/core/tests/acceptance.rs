//! Runs criteria A1–A10 and prints one line per criterion.
//!
//! Built without the libtest harness so the lines are always shown. Exits
//! nonzero on any failing comparison except those listed in
//! `validation::KNOWN_UNATTAINABLE`, which are printed as FAIL and
//! tolerated.

use std::process::ExitCode;

use cs_minimax::validation::{run_validation, ValidationOptions};

fn main() -> ExitCode {
    let reports = run_validation(&[], &ValidationOptions::default()).expect("criterion ids are valid");
    assert_eq!(reports.len(), 10);
    for r in &reports {
        println!("{r}");
    }
    let unexpected: Vec<&str> = reports.iter().filter(|r| !r.passed_except_known()).map(|r| r.id.as_str()).collect();
    if unexpected.is_empty() {
        println!("acceptance: ok ({} criteria)", reports.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria failed: {unexpected:?}");
        ExitCode::FAILURE
    }
}
