//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Plain `main` so the lines show up in ordinary `cargo test` output.

use std::process::ExitCode;

use bitprobe::acceptance::{run_acceptance, summary_line, CRITERIA};
use bitprobe::seed::Seed;

const SEED: u64 = 20_240_601;

fn main() -> ExitCode {
    let report = run_acceptance(Seed(SEED), &[]);
    for o in &report.outcomes {
        println!("{}", summary_line(o));
    }
    let seen: Vec<u32> = report.outcomes.iter().filter_map(|o| o.criterion).collect();
    let failing: Vec<u32> =
        report.outcomes.iter().filter(|o| !o.passed).filter_map(|o| o.criterion).collect();
    if seen != CRITERIA.collect::<Vec<_>>() || !failing.is_empty() {
        eprintln!("acceptance failed: criteria {failing:?}, reported {seen:?}");
        eprintln!("{}", report.payload());
        return ExitCode::FAILURE;
    }
    println!("acceptance: {} of {} criteria passed", seen.len(), CRITERIA.count());
    ExitCode::SUCCESS
}
