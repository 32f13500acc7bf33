//! One line per criterion; exits non-zero when any criterion fails or
//! overruns its limit. Runs without the libtest harness so the report is
//! never captured.

use ordalg_cli::corpus::seed_from_env;
use ordalg_cli::selftest::{run_criterion, CRITERIA};

fn main() {
    let seed = seed_from_env(1);
    println!("acceptance suite, seed {seed}");
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let r = run_criterion(id, seed);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria pass", CRITERIA.len());
    } else {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
