//! One line per acceptance criterion, each backed by the matching suite.

use std::process::ExitCode;

use gsp4::suite::{run, RunConfig, Status, SuiteName};

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let mut suites = SuiteName::ALL.to_vec();
    suites.sort_by_key(|s| s.criterion());
    let mut failed = 0;
    for suite in suites {
        let report = run(&[suite], &cfg).expect("default configuration is valid");
        let ms: u64 = report.checks.iter().map(|c| c.ms).sum();
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {:<13} {verdict}  ({} checks, {} skipped, {ms} ms of work)",
            suite.criterion(),
            suite.name(),
            report.checks.len(),
            report.count(Status::Skip),
        );
        for c in report.checks.iter().filter(|c| c.status == Status::Fail) {
            println!("    {}: {}", c.id, c.residual.as_deref().unwrap_or(""));
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} failed checks");
        ExitCode::FAILURE
    }
}
