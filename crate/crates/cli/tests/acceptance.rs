//! Acceptance suite: every criterion at its stated tolerance, one line each.
//!
//! `SRGEO_ACCEPTANCE=1,4,6` restricts the run to the listed criteria.

use std::process::ExitCode;

use srgeo_cli::verify::{run_all, VerifyOptions};

fn main() -> ExitCode {
    let only = std::env::var("SRGEO_ACCEPTANCE").ok().map(|s| s.split(',').filter_map(|p| p.trim().parse().ok()).collect());
    let report = run_all(&VerifyOptions { only, ..Default::default() }, |r| println!("{}", r.line()));
    println!("acceptance: {} passed, {} failed", report.results.len() - report.failed(), report.failed());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
