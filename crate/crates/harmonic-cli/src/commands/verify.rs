//! `harmonic verify`: the full cross-representation and closed-form test
//! battery; one pass/fail line per check and a JSON report.

use serde::Serialize;

use harmonic_core::verify::{run_all, CheckResult};

use crate::output::OutputSink;

#[derive(Serialize)]
struct VerifySummary {
    all_passed: bool,
    checks: Vec<CheckResult>,
}

/// Returns true if every executed check passed.
pub fn run_command(check: Option<&str>, sink: &OutputSink) -> anyhow::Result<bool> {
    let checks = run_all(check)?;
    if checks.is_empty() {
        anyhow::bail!("no check matched the requested name");
    }
    for c in &checks {
        println!("{}", c.line());
    }
    let all_passed = checks.iter().all(|c| c.passed);
    sink.write_json(
        "verify.json",
        &VerifySummary {
            all_passed,
            checks,
        },
    )?;
    Ok(all_passed)
}
