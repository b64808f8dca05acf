use std::process::ExitCode;

use jetkernel::suite::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("{}", r.line());
        if let Some(cx) = &r.counterexample {
            println!("     counterexample: {cx}");
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if results.len() == 12 && failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
