//! One line per acceptance criterion; exits nonzero when any fails.

use std::process::ExitCode;

use bandcorr_cli::config::VerifyConfig;
use bandcorr_cli::verify::run_suite;

fn main() -> ExitCode {
    let threads = std::env::var("BANDCORR_THREADS").ok().and_then(|s| s.parse().ok()).unwrap_or(1);
    let outcomes = match run_suite(&VerifyConfig::default(), 1, threads, |o| println!("{}", o.line())) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("acceptance suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
