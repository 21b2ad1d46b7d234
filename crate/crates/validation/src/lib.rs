//! Acceptance suite for `zakotfs-core` and `zakotfs`. The criteria live in
//! `tests/acceptance.rs`, a plain binary so every criterion prints its line.

use std::process::ExitCode;
use std::time::Instant;

/// One acceptance criterion: `run` returns the verdict and a detail string.
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: fn() -> (bool, String),
}

/// Runs the criteria selected by the command line, printing one line each.
///
/// Positional arguments select criteria whose number equals the argument or
/// whose name contains it; flags (as passed by `cargo test`) are ignored.
/// Fails if any selected criterion fails.
pub fn run_suite(criteria: &[Criterion]) -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected: Vec<&Criterion> = criteria
        .iter()
        .filter(|c| {
            filters.is_empty()
                || filters
                    .iter()
                    .any(|f| *f == c.id.to_string() || c.name.contains(f.as_str()))
        })
        .collect();
    let mut failed = Vec::new();
    for c in &selected {
        let start = Instant::now();
        let (pass, detail) = (c.run)();
        println!(
            "criterion {:>2} {}: {} ({detail}) [{:.1} s]",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !pass {
            failed.push(c.id);
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        selected.len() - failed.len(),
        selected.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
