//! One line per acceptance criterion, then the end-to-end `verify-all` run.

use std::process::{Command, ExitCode};
use std::time::Instant;

use fdeform_core::acceptance::{run_all, AcceptanceOptions};

fn main() -> ExitCode {
    let mut all = true;
    for outcome in run_all(&AcceptanceOptions::default()) {
        println!("{}", outcome.summary_line());
        if !outcome.passed {
            for c in outcome.checks.iter().filter(|c| !c.passed) {
                println!("     {} = {:e} (bound {:e})", c.name, c.value, c.bound);
            }
        }
        all &= outcome.passed;
    }

    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_fdeform"))
        .args(["verify-all", "--format", "columns"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed().as_secs_f64();
    let e2e = status.status.code() == Some(0) && elapsed < 180.0;
    println!(
        "{} {:<18} {:<44} {:>8.3}s / {:>5.0}s  exit {:?}",
        if e2e { "PASS" } else { "FAIL" },
        "end_to_end",
        "verify-all exits 0",
        elapsed,
        180.0,
        status.status.code()
    );
    all &= e2e;
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
